#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmap/qsim.hpp"
#include "qmap/tomography.hpp"

namespace qmap {

/// Neighbour index used for payoff rows of a nation that has no neighbours.
inline constexpr int kNoNeighbour = -1;

struct Tactic {
    enum class Kind { Defend, Attack, Explore };
    Kind kind = Kind::Explore;
    int target = kNoNeighbour;  // meaningful for Defend/Attack only

    static Tactic defend(int k) { return {Kind::Defend, k}; }
    static Tactic attack(int k) { return {Kind::Attack, k}; }
    static Tactic explore() { return {Kind::Explore, kNoNeighbour}; }

    std::string to_string() const;
    static Tactic parse(const std::string& s);

    auto operator<=>(const Tactic&) const = default;
};

class PolicyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// E_{j,k}(P) for each nation j, neighbour k and axis P.
struct PayoffTable {
    std::map<std::tuple<int, int, PauliAxis>, double> entries;

    double at(int j, int k, PauliAxis p) const;
    /// Rows (j, k, P, E), sorted by (j, k, P). Optionally limited to nation j.
    nlohmann::ordered_json to_json(std::optional<int> nation = std::nullopt) const;
};

using NeighbourMap = std::map<int, std::set<int>>;

/// Every nation listed in `neighbours` gets rows for each of its neighbours,
/// or a single kNoNeighbour row set (singles only) when it has none.
PayoffTable payoffs(const TomographySnapshot& snapshot, const NeighbourMap& neighbours);

/// Tactic carried by the payoff row (k, P): X defends k, Z attacks k, Y explores.
std::optional<Tactic> tactic_for_entry(int k, PauliAxis p);

/// Payoffs closer than this are treated as equal when ranking rows.
inline constexpr double kPayoffTieTolerance = 1e-9;

/// Highest-payoff feasible tactic for nation j. Among rows whose payoff is
/// within kPayoffTieTolerance of the best feasible row, the lowest axis
/// (X < Y < Z) wins, then the lowest neighbour index.
Tactic select_action(int j, const PayoffTable& table, const std::set<Tactic>& feasible);

/// Rotation taking `current` a `fraction` of the way toward the direction of
/// `target` while keeping its length.
AxisAngle synthesize_rotation(const BlochVector& current, const BlochVector& target, double fraction);

inline const BlochVector kDefendPole{1.0, 0.0, 0.0};
inline const BlochVector kExplorePole{0.0, 1.0, 0.0};
inline const BlochVector kAttackPole{0.0, 0.0, 1.0};

struct NationStats {
    long area = 0;
    long frontier = 0;
    long lost = 0;
    long gained = 0;

    friend bool operator==(const NationStats&, const NationStats&) = default;
};

struct FeedbackDirective {
    int nation = 0;
    BlochVector target;
    double fraction = 0.0;
};

/// Feedback toward the explore, defend or attack pole, driven by whichever of
/// frontier length, area lost or area gained is largest. Ties resolve in that
/// order. Returns nothing when all three are zero.
std::optional<FeedbackDirective> feedback_directive(int nation, const NationStats& stats, double radius);

/// Rotates j and k as close as possible to <X>=1, then applies cz(j, k).
/// Bloch vectors are read from `snapshot`. Returns the two rotations applied.
std::pair<AxisAngle, AxisAngle> war_gate(NetworkState& state, const TomographySnapshot& snapshot, int j, int k);

/// Rotates j fully toward <X>=1 and returns the rotation applied.
AxisAngle defeat_rotation(NetworkState& state, const BlochVector& current, int j);

}  // namespace qmap
