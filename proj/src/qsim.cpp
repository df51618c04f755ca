#include "qmap/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

namespace qmap {

char axis_char(PauliAxis p) {
    switch (p) {
        case PauliAxis::X: return 'X';
        case PauliAxis::Y: return 'Y';
        default: return 'Z';
    }
}

PauliAxis axis_from_char(char c) {
    switch (c) {
        case 'X': return PauliAxis::X;
        case 'Y': return PauliAxis::Y;
        case 'Z': return PauliAxis::Z;
        default: throw QsimError(std::string("unknown Pauli axis '") + c + "'");
    }
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector operator+(const BlochVector& a, const BlochVector& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
BlochVector operator-(const BlochVector& a, const BlochVector& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
BlochVector operator*(double s, const BlochVector& a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(const BlochVector& a, const BlochVector& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

BlochVector cross(const BlochVector& a, const BlochVector& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

BlochVector normalized(const BlochVector& a) {
    double n = a.norm();
    if (n == 0.0) {
        throw QsimError("cannot normalize a zero vector");
    }
    return (1.0 / n) * a;
}

BlochVector rotate(const BlochVector& v, const BlochVector& axis, double angle) {
    // Rodrigues' rotation formula.
    double c = std::cos(angle);
    double s = std::sin(angle);
    return c * v + s * cross(axis, v) + ((1.0 - c) * dot(axis, v)) * axis;
}

BlochVector even_policy_state() {
    double v = 1.0 / std::sqrt(3.0);
    return {v, v, v};
}

// ---------------------------------------------------------------------------
// NetworkState

NetworkState::NetworkState(int n, CouplingMap coupling) : n_(n), coupling_(std::move(coupling)) {}

NetworkState NetworkState::init(int n, CouplingMap coupling, const BlochVector& target, int qubit_cap) {
    if (n < 1) {
        throw QsimError("network needs at least one qubit");
    }
    if (n > qubit_cap) {
        throw QsimError("statevector cap exceeded: " + std::to_string(n) + " qubits requested, cap is " +
                        std::to_string(qubit_cap));
    }
    if (coupling.size() != n) {
        throw QsimError("coupling map size does not match qubit count");
    }
    double tn = target.norm();
    if (tn > 1.0 + kBlochSlack) {
        throw QsimError("initial target lies outside the Bloch ball");
    }
    if (tn < 1.0 - 1e-9) {
        // A pure product state can only reach the sphere surface.
        spdlog::warn("init target norm {} < 1; preparing the pure state along its direction", tn);
    }

    NetworkState s(n, std::move(coupling));
    s.amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
    s.amps_[0] = 1.0;

    // Rotate |0> (Bloch +z) onto the target direction.
    if (tn > 0.0) {
        BlochVector dir = (1.0 / tn) * target;
        BlochVector zhat{0.0, 0.0, 1.0};
        BlochVector axis = cross(zhat, dir);
        double axis_norm = axis.norm();
        double angle = std::atan2(axis_norm, dot(zhat, dir));
        AxisAngle gate;
        if (axis_norm > 1e-15) {
            gate = {normalized(axis), angle};
        } else if (dir.z < 0.0) {
            gate = {{1.0, 0.0, 0.0}, std::numbers::pi};
        }
        if (!gate.is_identity()) {
            for (int q = 0; q < n; ++q) {
                s.apply_1q(q, gate);
            }
        }
    }
    return s;
}

void NetworkState::set_amplitudes(std::vector<Amplitude> amps) {
    if (amps.size() != (std::size_t{1} << n_)) {
        throw QsimError("amplitude vector has wrong length");
    }
    double total = 0.0;
    for (const auto& a : amps) {
        total += std::norm(a);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw QsimError("amplitude vector is not normalized");
    }
    amps_ = std::move(amps);
}

void NetworkState::check_qubit(int q) const {
    if (q < 0 || q >= n_) {
        throw QsimError("qubit index " + std::to_string(q) + " out of range");
    }
}

double NetworkState::norm_squared() const {
    double total = 0.0;
    for (const auto& a : amps_) {
        total += std::norm(a);
    }
    return total;
}

void NetworkState::renormalize_if_drifted() {
    double total = norm_squared();
    if (std::abs(total - 1.0) > 1e-9) {
        spdlog::warn("statevector norm drifted to {:.3e}; renormalizing", total - 1.0);
        double inv = 1.0 / std::sqrt(total);
        for (auto& a : amps_) {
            a *= inv;
        }
    }
}

void NetworkState::apply_1q(int qubit, const AxisAngle& gate) {
    check_qubit(qubit);
    if (std::abs(gate.axis.norm() - 1.0) > 1e-9) {
        throw QsimError("rotation axis is not a unit vector");
    }
    if (gate.is_identity()) {
        return;
    }
    // exp(-i angle/2 n.sigma) = cos(angle/2) I - i sin(angle/2) n.sigma
    const double c = std::cos(gate.angle / 2.0);
    const double s = std::sin(gate.angle / 2.0);
    const auto& n = gate.axis;
    const Amplitude u00{c, -s * n.z};
    const Amplitude u01{-s * n.y, -s * n.x};
    const Amplitude u10{s * n.y, -s * n.x};
    const Amplitude u11{c, s * n.z};

    const std::size_t bit = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) {
            continue;
        }
        Amplitude a0 = amps_[i];
        Amplitude a1 = amps_[i | bit];
        amps_[i] = u00 * a0 + u01 * a1;
        amps_[i | bit] = u10 * a0 + u11 * a1;
    }
    renormalize_if_drifted();
}

void NetworkState::apply_cz(int j, int k) {
    check_qubit(j);
    check_qubit(k);
    if (j == k || !coupling_.has_edge(j, k)) {
        throw QsimError("coupling violation: cz on (" + std::to_string(j) + "," + std::to_string(k) +
                        ") is not a coupling-map edge");
    }
    const std::size_t mask = (std::size_t{1} << j) | (std::size_t{1} << k);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) {
            amps_[i] = -amps_[i];
        }
    }
}

double NetworkState::expect(std::span<const PauliTerm> terms) const {
    if (terms.empty() || terms.size() > 2) {
        throw QsimError("expect takes one or two Pauli factors");
    }
    std::size_t flip = 0;
    std::size_t sign_mask = 0;  // qubits contributing (-1)^bit (Y and Z)
    std::size_t used = 0;
    int y_count = 0;
    for (const auto& t : terms) {
        check_qubit(t.qubit);
        std::size_t bit = std::size_t{1} << t.qubit;
        if (used & bit) {
            throw QsimError("duplicate qubit index in expectation term");
        }
        used |= bit;
        switch (t.axis) {
            case PauliAxis::X: flip |= bit; break;
            case PauliAxis::Y:
                flip |= bit;
                sign_mask |= bit;
                ++y_count;
                break;
            case PauliAxis::Z: sign_mask |= bit; break;
        }
    }
    // P|i> = i^{y_count} (-1)^{popcount(i & sign_mask)} |i ^ flip>
    // <psi|P|psi> = sum_i conj(psi[i ^ flip]) * phase(i) * psi[i]
    Amplitude global{1.0, 0.0};
    for (int t = 0; t < y_count; ++t) {
        global *= Amplitude{0.0, 1.0};
    }
    Amplitude total{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        Amplitude term = std::conj(amps_[i ^ flip]) * amps_[i];
        if (std::popcount(i & sign_mask) & 1) {
            term = -term;
        }
        total += term;
    }
    double value = (global * total).real();
    return std::clamp(value, -1.0, 1.0);
}

double NetworkState::expect(PauliAxis p, int q) const {
    const PauliTerm t[1] = {{p, q}};
    return expect(t);
}

double NetworkState::expect(PauliAxis p, int j, PauliAxis q, int k) const {
    const PauliTerm t[2] = {{p, j}, {q, k}};
    return expect(t);
}

BlochVector NetworkState::bloch(int q) const {
    return {expect(PauliAxis::X, q), expect(PauliAxis::Y, q), expect(PauliAxis::Z, q)};
}

std::vector<std::uint64_t> NetworkState::sample(std::span<const PauliAxis> setting, int shots,
                                                std::mt19937_64& rng) const {
    if (static_cast<int>(setting.size()) != n_) {
        throw QsimError("measurement setting must assign an axis to every qubit");
    }
    if (shots < 1) {
        throw QsimError("shots must be at least 1");
    }
    NetworkState rotated = *this;
    for (int q = 0; q < n_; ++q) {
        switch (setting[q]) {
            case PauliAxis::X: rotated.apply_1q(q, {{0.0, 1.0, 0.0}, -std::numbers::pi / 2}); break;
            case PauliAxis::Y: rotated.apply_1q(q, {{1.0, 0.0, 0.0}, std::numbers::pi / 2}); break;
            case PauliAxis::Z: break;
        }
    }
    std::vector<double> cumulative(rotated.amps_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < rotated.amps_.size(); ++i) {
        acc += std::norm(rotated.amps_[i]);
        cumulative[i] = acc;
    }
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(shots));
    for (int s = 0; s < shots; ++s) {
        double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        out.push_back(static_cast<std::uint64_t>(it - cumulative.begin()));
    }
    return out;
}

}  // namespace qmap
