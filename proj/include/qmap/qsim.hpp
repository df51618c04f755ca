#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmap {

/// Measurement axis of a single qubit. The enumerator order is the
/// tie-breaking and serialization order used throughout the project.
enum class PauliAxis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<PauliAxis, 3> kAllAxes{PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

char axis_char(PauliAxis p);
PauliAxis axis_from_char(char c);

inline constexpr double kBlochSlack = 1e-9;

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator[](PauliAxis p) const {
        switch (p) {
            case PauliAxis::X: return x;
            case PauliAxis::Y: return y;
            default: return z;
        }
    }
    double& operator[](PauliAxis p) {
        switch (p) {
            case PauliAxis::X: return x;
            case PauliAxis::Y: return y;
            default: return z;
        }
    }
    double norm() const;
    bool is_valid(double slack = kBlochSlack) const { return x * x + y * y + z * z <= 1.0 + slack; }

    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

BlochVector operator+(const BlochVector& a, const BlochVector& b);
BlochVector operator-(const BlochVector& a, const BlochVector& b);
BlochVector operator*(double s, const BlochVector& a);
double dot(const BlochVector& a, const BlochVector& b);
BlochVector cross(const BlochVector& a, const BlochVector& b);
BlochVector normalized(const BlochVector& a);

/// Rotates `v` about the unit vector `axis` by `angle` (right-handed).
BlochVector rotate(const BlochVector& v, const BlochVector& axis, double angle);

/// The evenly distributed policy state (1/sqrt3, 1/sqrt3, 1/sqrt3).
BlochVector even_policy_state();

class QsimError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using QubitPair = std::pair<int, int>;

/// Unordered qubit pair normalized so that first < second.
inline QubitPair make_pair_sorted(int a, int b) { return a < b ? QubitPair{a, b} : QubitPair{b, a}; }

/// Graph of qubit pairs on which two-qubit gates are permitted.
class CouplingMap {
  public:
    CouplingMap() = default;
    CouplingMap(int n, std::vector<QubitPair> edges);

    static CouplingMap from_json_text(const std::string& text);
    static CouplingMap load(const std::filesystem::path& path);
    std::string to_json_text() const;

    static CouplingMap path(int n);
    static CouplingMap ring(int n);

    int size() const { return n_; }
    const std::vector<QubitPair>& edges() const { return edges_; }
    bool has_edge(int a, int b) const;
    std::vector<int> neighbours(int q) const;
    bool is_connected() const;

    /// Two-coloring of the nodes (0/1 per node), or empty when not bipartite.
    /// The lowest-index node of each connected component gets color 0.
    std::vector<int> bicoloring() const;

    friend bool operator==(const CouplingMap&, const CouplingMap&) = default;

  private:
    int n_ = 0;
    std::vector<QubitPair> edges_;  // sorted, deduplicated
};

struct AxisAngle {
    BlochVector axis{0.0, 0.0, 1.0};
    double angle = 0.0;

    static AxisAngle identity() { return {}; }
    bool is_identity() const { return angle == 0.0; }
};

/// A single-qubit (or two-qubit) Pauli factor used by `NetworkState::expect`.
struct PauliTerm {
    PauliAxis axis;
    int qubit;
};

/// Deterministic uniform double in [0, 1) from a 64-bit engine. Kept out of
/// std::uniform_real_distribution so sampled streams are identical across
/// standard library implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline constexpr int kDefaultQubitCap = 20;

/// Exact pure statevector of an n-qubit network. Qubit 0 is the least
/// significant bit of the amplitude index.
class NetworkState {
  public:
    using Amplitude = std::complex<double>;

    /// Prepares every qubit at <Z>=1 and rotates it onto `target`.
    static NetworkState init(int n, CouplingMap coupling, const BlochVector& target,
                             int qubit_cap = kDefaultQubitCap);

    int size() const { return n_; }
    const CouplingMap& coupling() const { return coupling_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }

    /// Replaces the amplitudes; the vector must have 2^n entries and unit norm.
    void set_amplitudes(std::vector<Amplitude> amps);

    void apply_1q(int qubit, const AxisAngle& gate);
    void apply_cz(int j, int k);

    /// Exact expectation value of a product of one or two Pauli factors on
    /// distinct qubits.
    double expect(std::span<const PauliTerm> terms) const;
    double expect(PauliAxis p, int q) const;
    double expect(PauliAxis p, int j, PauliAxis q, int k) const;
    BlochVector bloch(int q) const;

    /// Draws `shots` outcomes after rotating each qubit into the basis given by
    /// `setting[q]`. Bit q of an outcome is qubit q's result (0 means +1).
    std::vector<std::uint64_t> sample(std::span<const PauliAxis> setting, int shots,
                                      std::mt19937_64& rng) const;

    double norm_squared() const;

  private:
    NetworkState(int n, CouplingMap coupling);
    void check_qubit(int q) const;
    void renormalize_if_drifted();

    int n_ = 0;
    CouplingMap coupling_;
    std::vector<Amplitude> amps_;
};

}  // namespace qmap
