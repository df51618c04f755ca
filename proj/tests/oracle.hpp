#pragma once
// Independent dense-matrix reference implementations used as test oracles.
// Nothing here calls into the statevector code under test: operators are
// built explicitly as 2^n x 2^n matrices from Kronecker products.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

struct Matrix {
    int dim = 0;
    std::vector<cd> a;  // row-major

    explicit Matrix(int d) : dim(d), a(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {}
    cd& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
    cd operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

    static Matrix identity(int d) {
        Matrix m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.dim * B.dim);
    for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j)
            for (int k = 0; k < B.dim; ++k)
                for (int l = 0; l < B.dim; ++l) out(i * B.dim + k, j * B.dim + l) = A(i, j) * B(k, l);
    return out;
}

inline Matrix mul(const Matrix& A, const Matrix& B) {
    Matrix out(A.dim);
    for (int i = 0; i < A.dim; ++i)
        for (int k = 0; k < A.dim; ++k)
            for (int j = 0; j < A.dim; ++j) out(i, j) += A(i, k) * B(k, j);
    return out;
}

inline std::vector<cd> apply(const Matrix& M, const std::vector<cd>& v) {
    std::vector<cd> out(v.size());
    for (int i = 0; i < M.dim; ++i)
        for (int j = 0; j < M.dim; ++j) out[static_cast<std::size_t>(i)] += M(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

// 0 = I, 1 = X, 2 = Y, 3 = Z
inline Matrix pauli(int which) {
    Matrix m(2);
    const cd i(0.0, 1.0);
    switch (which) {
        case 0: m(0, 0) = 1; m(1, 1) = 1; break;
        case 1: m(0, 1) = 1; m(1, 0) = 1; break;
        case 2: m(0, 1) = -i; m(1, 0) = i; break;
        default: m(0, 0) = 1; m(1, 1) = -1; break;
    }
    return m;
}

// Full operator for a per-qubit Pauli string. Qubit 0 is the least significant
// bit of the basis index, so it is the rightmost Kronecker factor.
inline Matrix pauli_string(const std::vector<int>& ops) {
    Matrix m = Matrix::identity(1);
    for (int q = static_cast<int>(ops.size()) - 1; q >= 0; --q) m = kron(m, pauli(ops[static_cast<std::size_t>(q)]));
    return m;
}

// exp(-i theta/2 n.sigma) = cos(theta/2) I - i sin(theta/2) n.sigma
inline Matrix rotation(double nx, double ny, double nz, double theta) {
    Matrix m(2);
    const cd i(0.0, 1.0);
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Matrix X = pauli(1), Y = pauli(2), Z = pauli(3);
    for (int r = 0; r < 2; ++r)
        for (int col = 0; col < 2; ++col)
            m(r, col) = (r == col ? c : 0.0) - i * s * (nx * X(r, col) + ny * Y(r, col) + nz * Z(r, col));
    return m;
}

inline Matrix embed_1q(const Matrix& u, int qubit, int n) {
    Matrix m = Matrix::identity(1);
    for (int q = n - 1; q >= 0; --q) m = kron(m, q == qubit ? u : Matrix::identity(2));
    return m;
}

inline Matrix cz(int j, int k, int n) {
    Matrix m(1 << n);
    for (int b = 0; b < (1 << n); ++b) m(b, b) = (((b >> j) & 1) && ((b >> k) & 1)) ? -1.0 : 1.0;
    return m;
}

inline double expectation(const Matrix& op, const std::vector<cd>& psi) {
    auto phi = apply(op, psi);
    cd acc = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(psi[i]) * phi[i];
    return acc.real();
}

// Pure single-qubit state with Bloch vector along (theta, phi).
inline std::vector<cd> qubit_state(double theta, double phi) {
    return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
}

inline std::vector<cd> product(const std::vector<std::vector<cd>>& qubits) {
    std::vector<cd> out{1.0};
    for (int q = static_cast<int>(qubits.size()) - 1; q >= 0; --q) {
        const auto& s = qubits[static_cast<std::size_t>(q)];
        std::vector<cd> next(out.size() * 2);
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t b = 0; b < 2; ++b) next[i * 2 + b] = out[i] * s[b];
        out = std::move(next);
    }
    return out;
}

// Random unit vector, uniform on the sphere.
template <class Rng>
std::array<double, 3> random_unit(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        double x = g(rng), y = g(rng), z = g(rng);
        double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1e-6) return {x / n, y / n, z / n};
    }
}

}  // namespace oracle
