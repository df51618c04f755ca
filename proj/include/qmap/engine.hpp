#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmap/mapgen.hpp"
#include "qmap/policy.hpp"
#include "qmap/qsim.hpp"
#include "qmap/tomography.hpp"

namespace qmap {

inline constexpr int kHistoryFormatVersion = 1;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class OpponentColoring { None, ColorA, ColorB };
std::string to_string(OpponentColoring c);
OpponentColoring opponent_coloring_from_string(const std::string& s);

struct RunConfig {
    CouplingMap coupling;
    MapConfig map;
    int rounds = 20;
    std::uint64_t seed = 1;
    TomographyMode tomography = TomographyMode::Exact;
    int shots = 8192;
    OpponentColoring opponents = OpponentColoring::None;
    std::set<int> humans;
    std::uint64_t layout_seed = 1;
    std::optional<std::vector<Cell>> layout_positions;
    /// Mean capital distance across coupling edges, in cells; unset means
    /// kDefaultSpacingRadii * radius. Zero stretches the layout over the grid.
    std::optional<double> layout_spacing;
    int qubit_cap = kDefaultQubitCap;

    static constexpr double kDefaultSpacingRadii = 5.0;

    int nations() const { return coupling.size(); }
    double spacing() const { return layout_spacing.value_or(kDefaultSpacingRadii * map.radius); }
    /// Throws ConfigError on any violated precondition.
    void validate() const;
    std::set<int> opponent_set() const;

    nlohmann::ordered_json to_json() const;
    /// Unknown fields are rejected.
    static RunConfig from_json(const nlohmann::json& doc);
    /// First key of `doc` that is not a RunConfig field, if any.
    static std::optional<std::string> unknown_field(const nlohmann::json& doc);
};

/// Force-directed layout of the coupling graph, centred in the grid and scaled
/// so coupled capitals sit `spacing` cells apart on average (never beyond the
/// grid margins; spacing 0 fills the grid). Capitals are distinct cells at
/// least two cells apart. Explicit positions win.
std::vector<Cell> initial_layout(const CouplingMap& coupling, const MapConfig& config, std::uint64_t seed,
                                 double spacing,
                                 const std::optional<std::vector<Cell>>& explicit_positions = std::nullopt);

struct GateEvent {
    enum class Kind { War, Defeat, Feedback };
    Kind kind = Kind::Feedback;
    int j = 0;
    int k = -1;  // second party of a war gate
    std::vector<AxisAngle> rotations;
    BlochVector target;
    double fraction = 1.0;
};

/// End-of-round razing that brings a nation back under its city cap.
struct UpkeepRazing {
    int nation = 0;
    Cell pos;
    std::size_t after_transfers = 0;  // transfers applied before this razing
};

struct RoundRecord {
    int round = 0;
    std::vector<std::string> tactics;        // per nation
    std::vector<Placement> placements;       // in placement order
    std::vector<Transfer> transfers;         // in application order
    std::vector<UpkeepRazing> upkeep;        // interleaved with transfers
    std::vector<NationStats> stats;          // per nation
    std::vector<BlochVector> bloch;          // per nation, after feedback
    std::vector<GateEvent> gates;
    nlohmann::ordered_json snapshot;         // decision tomography

    nlohmann::ordered_json to_json() const;
    static RoundRecord from_json(const nlohmann::json& doc);
};

/// Payoff rows for one nation plus the tactic and cell the engine would choose.
struct Advice {
    int nation = 0;
    bool eliminated = false;
    PayoffTable table;
    std::optional<Tactic> tactic;
    std::optional<Cell> cell;
    BlochVector bloch;
};

/// Cell placements for human nations, keyed by round then nation.
using PlacementScript = std::map<int, std::map<int, Cell>>;

class Simulation {
  public:
    explicit Simulation(RunConfig config);

    const RunConfig& config() const { return config_; }
    const WorldMap& world() const { return world_; }
    const NetworkState& network() const { return network_; }
    const std::vector<Cell>& layout() const { return layout_; }
    const std::vector<RoundRecord>& records() const { return records_; }
    int rounds_done() const { return static_cast<int>(records_.size()); }
    bool finished() const { return rounds_done() >= config_.rounds; }

    bool is_opponent(int j) const { return opponents_.count(j) != 0; }
    bool is_human(int j) const { return config_.humans.count(j) != 0; }
    std::string group(int j) const;

    /// Nations sharing a land border, from the current map.
    NeighbourMap land_neighbours() const;
    PairSet decision_pairs(const NeighbourMap& land) const;
    /// Tomography used for the next round's decisions. Pure: sampled mode
    /// draws from a stream derived from the seed and round index.
    TomographySnapshot decision_snapshot() const;

    std::set<Tactic> feasible_tactics(int j, const NeighbourMap& land) const;
    Advice advise(int nation) const;

    /// Runs one round. Human nations consume `human_placements`; those without
    /// an entry skip their placement.
    const RoundRecord& advance(const std::map<int, Cell>& human_placements = {});

    nlohmann::ordered_json history_json() const;
    std::string history_text() const;

  private:
    BlochVector current_bloch(int q, int round, int salt) const;

    RunConfig config_;
    std::set<int> opponents_;
    std::vector<Cell> layout_;
    WorldMap world_;
    NetworkState network_;
    std::vector<RoundRecord> records_;
};

/// Runs every round autonomously, injecting scripted human placements.
Simulation run_generate(const RunConfig& config, const PlacementScript& script = {});

/// Rebuilds the world as of `round` (0 = initial layout) from a history document.
WorldMap replay_world(const nlohmann::json& history, int round);

struct ExperimentConfig {
    RunConfig base;
    int runs = 10;
    bool opponents = true;
    int threads = 0;  // 0 = hardware concurrency
};

struct SummaryRow {
    int round = 0;
    std::string group;
    double mean_area = 0.0;
    double std_area = 0.0;
};

struct ExperimentSummary {
    std::vector<SummaryRow> rows;
    /// Per run, per round, group mean area; indexed [run][group][round].
    std::vector<std::map<std::string, std::vector<double>>> per_run;
    std::vector<OpponentColoring> colorings;

    double final_mean(const std::string& group) const;
    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

/// The opponent study: half the runs use each bicoloring as the opponent set.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Configuration of run `index` within an experiment.
RunConfig experiment_run_config(const ExperimentConfig& config, int index);

}  // namespace qmap
