#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmap/qsim.hpp"

namespace qmap {

/// Unordered qubit pairs whose correlations a snapshot must carry.
class PairSet {
  public:
    PairSet() = default;
    explicit PairSet(std::set<QubitPair> pairs) {
        for (auto [a, b] : pairs) insert(a, b);
    }

    void insert(int a, int b);
    bool contains(int a, int b) const { return pairs_.count(make_pair_sorted(a, b)) != 0; }
    const std::set<QubitPair>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }
    std::size_t size() const { return pairs_.size(); }
    void validate(int n) const;

  private:
    std::set<QubitPair> pairs_;
};

struct MeasurementPlan {
    std::vector<std::vector<PauliAxis>> settings;
    int shots_per_setting = 8192;
    PairSet pairs;

    /// True when every pair gets every ordered (P, Q) combination from some setting.
    bool covers(const PairSet& required) const;
};

enum class TomographyMode { Exact, Sampled };

std::string to_string(TomographyMode m);
TomographyMode tomography_mode_from_string(const std::string& s);

class TomographyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Single-qubit Bloch vectors plus pairwise correlations <P_j Q_k>.
class TomographySnapshot {
  public:
    TomographyMode mode = TomographyMode::Exact;
    std::vector<BlochVector> singles;

    /// Correlation for the ordered factors (P on j, Q on k); either order of
    /// j and k may be requested. Throws when the pair was not measured.
    double correlation(int j, PauliAxis p, int k, PauliAxis q) const;
    bool has_pair(int j, int k) const;
    void set_correlation(int j, PauliAxis p, int k, PauliAxis q, double value);
    std::vector<QubitPair> pairs() const;

    /// Keyed "q{j}:{P}" and "q{j}q{k}:{P}{Q}" with j < k.
    nlohmann::ordered_json to_json() const;

    /// Checks the single-qubit and pairwise sum-of-squares bounds within `slack`.
    /// Returns a description of the first violation, or empty when valid.
    std::string violation(double slack) const;

    int size() const { return static_cast<int>(singles.size()); }

  private:
    // key: (j, k, P, Q) with j < k
    std::map<std::tuple<int, int, PauliAxis, PauliAxis>, double> correlations_;
};

TomographySnapshot exact_snapshot(const NetworkState& state, const PairSet& pairs);

/// Greedy proper coloring of the pair graph over all n qubits, then nine
/// settings per unordered color pair (P on the lower class, Q on the higher).
/// A single color class falls back to the three uniform settings.
MeasurementPlan plan_settings(const PairSet& pairs, int n, int shots_per_setting = 8192);

/// Greedy coloring used by `plan_settings`; exposed for tests.
std::vector<int> greedy_coloring(const PairSet& pairs, int n);

TomographySnapshot sampled_snapshot(const NetworkState& state, const MeasurementPlan& plan,
                                    std::uint64_t seed);

/// Tolerance used to accept a sampled snapshot against the physical bounds.
double sampled_tolerance(int shots_per_setting);

}  // namespace qmap
