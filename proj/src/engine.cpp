#include "qmap/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmap/seed.hpp"

namespace qmap {

namespace {

using ojson = nlohmann::ordered_json;

ojson cell_json(Cell c) { return ojson::array({c.x, c.y}); }

Cell cell_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError("cell must be a two-element array [x, y]");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

ojson bloch_json(const BlochVector& b) { return ojson::array({b.x, b.y, b.z}); }

BlochVector bloch_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

std::string gate_kind_name(GateEvent::Kind k) {
    switch (k) {
        case GateEvent::Kind::War: return "war";
        case GateEvent::Kind::Defeat: return "defeat";
        default: return "feedback";
    }
}

GateEvent::Kind gate_kind_from(const std::string& s) {
    if (s == "war") return GateEvent::Kind::War;
    if (s == "defeat") return GateEvent::Kind::Defeat;
    if (s == "feedback") return GateEvent::Kind::Feedback;
    throw ConfigError("unknown gate kind '" + s + "'");
}

}  // namespace

std::string to_string(OpponentColoring c) {
    switch (c) {
        case OpponentColoring::ColorA: return "colorA";
        case OpponentColoring::ColorB: return "colorB";
        default: return "none";
    }
}

OpponentColoring opponent_coloring_from_string(const std::string& s) {
    if (s == "none") return OpponentColoring::None;
    if (s == "colorA") return OpponentColoring::ColorA;
    if (s == "colorB") return OpponentColoring::ColorB;
    throw ConfigError("unknown opponent coloring '" + s + "'");
}

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
    if (coupling.size() < 1) {
        throw ConfigError("coupling map is empty");
    }
    if (rounds < 1) {
        throw ConfigError("rounds must be at least 1");
    }
    if (shots < 1) {
        throw ConfigError("shots must be at least 1");
    }
    try {
        map.validate();
    } catch (const MapError& e) {
        throw ConfigError(e.what());
    }
    if (nations() > qubit_cap) {
        throw ConfigError("statevector cap exceeded: " + std::to_string(nations()) + " nations, cap " +
                          std::to_string(qubit_cap));
    }
    for (int h : humans) {
        if (h < 0 || h >= nations()) {
            throw ConfigError("human nation " + std::to_string(h) + " out of range");
        }
    }
    auto opp = opponent_set();
    for (int h : humans) {
        if (opp.count(h)) {
            throw ConfigError("human nation " + std::to_string(h) + " is also an opponent");
        }
    }
    if (layout_spacing && !(*layout_spacing >= 0.0)) {
        throw ConfigError("layout spacing must be non-negative");
    }
    if (layout_positions && static_cast<int>(layout_positions->size()) != nations()) {
        throw ConfigError("layout must give one position per nation");
    }
}

std::set<int> RunConfig::opponent_set() const {
    std::set<int> out;
    if (opponents == OpponentColoring::None) {
        return out;
    }
    auto colors = coupling.bicoloring();
    if (colors.empty()) {
        throw ConfigError("bicoloring error: coupling map is not bipartite");
    }
    int want = opponents == OpponentColoring::ColorA ? 0 : 1;
    for (int q = 0; q < nations(); ++q) {
        if (colors[static_cast<std::size_t>(q)] == want) out.insert(q);
    }
    return out;
}

ojson RunConfig::to_json() const {
    ojson doc;
    doc["coupling"] = ojson::parse(coupling.to_json_text());
    doc["size"] = map.size;
    doc["radius"] = map.radius;
    doc["rounds"] = rounds;
    doc["seed"] = seed;
    doc["tomography"] = to_string(tomography);
    doc["shots"] = shots;
    doc["opponents"] = to_string(opponents);
    doc["humans"] = ojson(std::vector<int>(humans.begin(), humans.end()));
    doc["layout_seed"] = layout_seed;
    if (layout_positions) {
        auto arr = ojson::array();
        for (Cell c : *layout_positions) arr.push_back(cell_json(c));
        doc["layout"] = arr;
    }
    doc["layout_spacing"] = spacing();
    doc["qubit_cap"] = qubit_cap;
    return doc;
}

std::optional<std::string> RunConfig::unknown_field(const nlohmann::json& doc) {
    static const std::set<std::string> kFields = {"coupling", "size",      "radius",   "rounds",
                                                  "seed",     "tomography", "shots",    "opponents",
                                                  "humans",   "layout_seed", "layout", "layout_spacing", "qubit_cap"};
    if (!doc.is_object()) return std::nullopt;
    for (const auto& [key, value] : doc.items()) {
        if (!kFields.count(key)) return key;
    }
    return std::nullopt;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("run config must be an object");
    }
    if (auto key = unknown_field(doc)) {
        throw ConfigError("unknown field '" + *key + "'");
    }
    RunConfig c;
    try {
        if (!doc.contains("coupling")) {
            throw ConfigError("run config needs a coupling map");
        }
        c.coupling = CouplingMap::from_json_text(doc.at("coupling").dump());
        c.map.size = doc.value("size", c.map.size);
        c.map.radius = doc.value("radius", c.map.radius);
        c.rounds = doc.value("rounds", c.rounds);
        c.seed = doc.value("seed", c.seed);
        c.tomography = tomography_mode_from_string(doc.value("tomography", std::string("exact")));
        c.shots = doc.value("shots", c.shots);
        c.opponents = opponent_coloring_from_string(doc.value("opponents", std::string("none")));
        if (doc.contains("humans")) {
            for (const auto& h : doc.at("humans")) c.humans.insert(h.get<int>());
        }
        c.layout_seed = doc.value("layout_seed", c.seed);
        if (doc.contains("layout")) {
            std::vector<Cell> pos;
            for (const auto& p : doc.at("layout")) pos.push_back(cell_from_json(p));
            c.layout_positions = std::move(pos);
        }
        if (doc.contains("layout_spacing")) c.layout_spacing = doc.at("layout_spacing").get<double>();
        c.qubit_cap = doc.value("qubit_cap", c.qubit_cap);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run config: ") + e.what());
    } catch (const QsimError& e) {
        throw ConfigError(e.what());
    } catch (const TomographyError& e) {
        throw ConfigError(e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Layout

std::vector<Cell> initial_layout(const CouplingMap& coupling, const MapConfig& config, std::uint64_t seed,
                                 double spacing,
                                 const std::optional<std::vector<Cell>>& explicit_positions) {
    const int n = coupling.size();
    const int L = config.size;
    auto separated = [](Cell a, Cell b) {
        long dx = a.x - b.x, dy = a.y - b.y;
        return dx * dx + dy * dy >= 4;
    };
    if (explicit_positions) {
        if (static_cast<int>(explicit_positions->size()) != n) {
            throw ConfigError("layout must give one position per nation");
        }
        for (std::size_t i = 0; i < explicit_positions->size(); ++i) {
            Cell c = (*explicit_positions)[i];
            if (c.x < 0 || c.y < 0 || c.x >= L || c.y >= L) {
                throw ConfigError("layout position out of bounds");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (!separated(c, (*explicit_positions)[j])) {
                    throw ConfigError("layout positions must be at least 2 cells apart");
                }
            }
        }
        return *explicit_positions;
    }

    // Fruchterman-Reingold in the unit square.
    std::mt19937_64 rng(derive_seed(seed, "layout.force"));
    std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        px[static_cast<std::size_t>(i)] = uniform01(rng);
        py[static_cast<std::size_t>(i)] = uniform01(rng);
    }
    const double k = std::sqrt(1.0 / n);
    constexpr int kIterations = 500;
    std::vector<double> dx(static_cast<std::size_t>(n)), dy(static_cast<std::size_t>(n));
    for (int it = 0; it < kIterations && n > 1; ++it) {
        std::fill(dx.begin(), dx.end(), 0.0);
        std::fill(dy.begin(), dy.end(), 0.0);
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                double ex = px[a] - px[b], ey = py[a] - py[b];
                double d = std::max(std::hypot(ex, ey), 1e-9);
                double f = k * k / d;
                dx[a] += ex / d * f;
                dy[a] += ey / d * f;
                dx[b] -= ex / d * f;
                dy[b] -= ey / d * f;
            }
        }
        for (auto [a, b] : coupling.edges()) {
            double ex = px[a] - px[b], ey = py[a] - py[b];
            double d = std::max(std::hypot(ex, ey), 1e-9);
            double f = d * d / k;
            dx[a] -= ex / d * f;
            dy[a] -= ey / d * f;
            dx[b] += ex / d * f;
            dy[b] += ey / d * f;
        }
        double temp = 0.1 * (1.0 - static_cast<double>(it) / kIterations) + 1e-4;
        for (int a = 0; a < n; ++a) {
            double len = std::hypot(dx[a], dy[a]);
            if (len > 0.0) {
                double step = std::min(len, temp);
                px[a] += dx[a] / len * step;
                py[a] += dy[a] / len * step;
            }
        }
    }

    auto [xmin, xmax] = std::minmax_element(px.begin(), px.end());
    auto [ymin, ymax] = std::minmax_element(py.begin(), py.end());
    double cx = (*xmin + *xmax) / 2.0, cy = (*ymin + *ymax) / 2.0;
    double extent = std::max(*xmax - *xmin, *ymax - *ymin);
    if (extent < 1e-12) extent = 1.0;
    double margin = std::min(2.0 * config.radius, L / 4.0);
    double usable = (L - 1) - 2.0 * margin;
    if (spacing > 0.0 && !coupling.edges().empty()) {
        double mean_edge = 0.0;
        for (auto [a, b] : coupling.edges()) mean_edge += std::hypot(px[a] - px[b], py[a] - py[b]);
        mean_edge /= static_cast<double>(coupling.edges().size());
        if (mean_edge > 1e-12) usable = std::min(usable, spacing * extent / mean_edge);
    }
    double mid = (L - 1) / 2.0;

    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int x = static_cast<int>(std::lround(mid + (px[i] - cx) / extent * usable));
        int y = static_cast<int>(std::lround(mid + (py[i] - cy) / extent * usable));
        Cell c{std::clamp(x, 0, L - 1), std::clamp(y, 0, L - 1)};
        auto ok = [&](Cell cand) {
            return std::all_of(out.begin(), out.end(), [&](Cell o) { return separated(cand, o); });
        };
        if (!ok(c)) {
            bool found = false;
            for (int rad = 1; rad < L && !found; ++rad) {
                for (int oy = -rad; oy <= rad && !found; ++oy) {
                    for (int ox = -rad; ox <= rad && !found; ++ox) {
                        if (std::max(std::abs(ox), std::abs(oy)) != rad) continue;
                        Cell cand{c.x + ox, c.y + oy};
                        if (cand.x < 0 || cand.y < 0 || cand.x >= L || cand.y >= L) continue;
                        if (ok(cand)) {
                            c = cand;
                            found = true;
                        }
                    }
                }
            }
            if (!found) {
                throw ConfigError("cannot place capitals with the required separation");
            }
        }
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// RoundRecord

ojson RoundRecord::to_json() const {
    ojson doc;
    doc["round"] = round;
    doc["tactics"] = tactics;
    auto pl = ojson::array();
    for (const auto& p : placements) {
        auto razed = ojson::array();
        for (Cell c : p.razed) razed.push_back(cell_json(c));
        pl.push_back({{"nation", p.nation}, {"cell", cell_json(p.pos)}, {"razed", razed}});
    }
    doc["placements"] = pl;
    auto tr = ojson::array();
    for (const auto& t : transfers) {
        tr.push_back({{"cell", cell_json(t.pos)}, {"from", t.old_owner}, {"to", t.new_owner}});
    }
    doc["transfers"] = tr;
    auto up = ojson::array();
    for (const auto& u : upkeep) {
        up.push_back({{"nation", u.nation}, {"cell", cell_json(u.pos)}, {"after_transfers", u.after_transfers}});
    }
    doc["upkeep"] = up;
    auto st = ojson::array();
    for (const auto& s : stats) {
        st.push_back({{"A", s.area}, {"f", s.frontier}, {"A_l", s.lost}, {"A_g", s.gained}});
    }
    doc["stats"] = st;
    auto bl = ojson::array();
    for (const auto& b : bloch) bl.push_back(bloch_json(b));
    doc["bloch"] = bl;
    auto gl = ojson::array();
    for (const auto& g : gates) {
        ojson e;
        e["kind"] = gate_kind_name(g.kind);
        e["j"] = g.j;
        if (g.kind == GateEvent::Kind::War) e["k"] = g.k;
        auto rot = ojson::array();
        for (const auto& r : g.rotations) rot.push_back({{"axis", bloch_json(r.axis)}, {"angle", r.angle}});
        e["rotations"] = rot;
        if (g.kind == GateEvent::Kind::Feedback) {
            e["target"] = bloch_json(g.target);
            e["fraction"] = g.fraction;
        }
        gl.push_back(e);
    }
    doc["gates"] = gl;
    doc["snapshot"] = snapshot;
    return doc;
}

RoundRecord RoundRecord::from_json(const nlohmann::json& doc) {
    RoundRecord r;
    r.round = doc.at("round").get<int>();
    r.tactics = doc.at("tactics").get<std::vector<std::string>>();
    for (const auto& p : doc.at("placements")) {
        Placement pl;
        pl.nation = p.at("nation").get<int>();
        pl.pos = cell_from_json(p.at("cell"));
        for (const auto& c : p.at("razed")) pl.razed.push_back(cell_from_json(c));
        r.placements.push_back(pl);
    }
    for (const auto& t : doc.at("transfers")) {
        r.transfers.push_back({cell_from_json(t.at("cell")), t.at("from").get<int>(), t.at("to").get<int>()});
    }
    for (const auto& u : doc.at("upkeep")) {
        r.upkeep.push_back(
            {u.at("nation").get<int>(), cell_from_json(u.at("cell")), u.at("after_transfers").get<std::size_t>()});
    }
    for (const auto& s : doc.at("stats")) {
        r.stats.push_back({s.at("A").get<long>(), s.at("f").get<long>(), s.at("A_l").get<long>(), s.at("A_g").get<long>()});
    }
    for (const auto& b : doc.at("bloch")) r.bloch.push_back(bloch_from_json(b));
    for (const auto& g : doc.at("gates")) {
        GateEvent e;
        e.kind = gate_kind_from(g.at("kind").get<std::string>());
        e.j = g.at("j").get<int>();
        e.k = g.value("k", -1);
        for (const auto& rot : g.at("rotations")) {
            e.rotations.push_back({bloch_from_json(rot.at("axis")), rot.at("angle").get<double>()});
        }
        if (g.contains("target")) e.target = bloch_from_json(g.at("target"));
        e.fraction = g.value("fraction", 1.0);
        r.gates.push_back(e);
    }
    r.snapshot = doc.at("snapshot");
    return r;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(RunConfig config)
    : config_((config.validate(), std::move(config))),
      opponents_(config_.opponent_set()),
      layout_(initial_layout(config_.coupling, config_.map, config_.layout_seed, config_.spacing(),
                             config_.layout_positions)),
      world_(config_.map, config_.nations()),
      network_(NetworkState::init(config_.nations(), config_.coupling, even_policy_state(), config_.qubit_cap)) {
    for (int j = 0; j < config_.nations(); ++j) {
        world_.add_city({j, layout_[static_cast<std::size_t>(j)], true, 0});
    }
}

std::string Simulation::group(int j) const {
    if (is_human(j)) return "human";
    if (is_opponent(j)) return "opponent";
    return "standard";
}

NeighbourMap Simulation::land_neighbours() const {
    NeighbourMap out;
    auto all = all_borders(world_);
    for (int j = 0; j < config_.nations(); ++j) {
        auto& set = out[j];
        for (const auto& [k, cells] : all[static_cast<std::size_t>(j)].with_neighbour) {
            if (!cells.empty()) set.insert(k);
        }
    }
    return out;
}

PairSet Simulation::decision_pairs(const NeighbourMap& land) const {
    PairSet pairs;
    for (const auto& [j, ks] : land) {
        for (int k : ks) pairs.insert(j, k);
    }
    for (auto [a, b] : config_.coupling.edges()) {
        if (!world_.eliminated(a) && !world_.eliminated(b)) pairs.insert(a, b);
    }
    return pairs;
}

TomographySnapshot Simulation::decision_snapshot() const {
    PairSet pairs = decision_pairs(land_neighbours());
    if (config_.tomography == TomographyMode::Exact) {
        return exact_snapshot(network_, pairs);
    }
    MeasurementPlan plan = plan_settings(pairs, network_.size(), config_.shots);
    return sampled_snapshot(network_, plan,
                            derive_seed(config_.seed, "tomography.decision",
                                        {static_cast<std::uint64_t>(rounds_done() + 1)}));
}

BlochVector Simulation::current_bloch(int q, int round, int salt) const {
    if (config_.tomography == TomographyMode::Exact) {
        return network_.bloch(q);
    }
    MeasurementPlan plan = plan_settings(PairSet{}, network_.size(), config_.shots);
    auto snap = sampled_snapshot(network_, plan,
                                 derive_seed(config_.seed, "tomography.refresh",
                                             {static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(salt)}));
    return snap.singles[static_cast<std::size_t>(q)];
}

std::set<Tactic> Simulation::feasible_tactics(int j, const NeighbourMap& land) const {
    std::set<Tactic> out;
    if (world_.eliminated(j) || capped_out(world_, j)) {
        return out;
    }
    Borders b = borders(world_, j);
    auto it = land.find(j);
    if (it != land.end()) {
        for (int k : it->second) {
            if (choose_cell(world_, j, Tactic::defend(k), b)) out.insert(Tactic::defend(k));
            if (choose_cell(world_, j, Tactic::attack(k), b)) out.insert(Tactic::attack(k));
        }
    }
    if (choose_cell(world_, j, Tactic::explore(), b)) out.insert(Tactic::explore());
    return out;
}

Advice Simulation::advise(int nation) const {
    if (nation < 0 || nation >= config_.nations()) {
        throw ConfigError("nation " + std::to_string(nation) + " out of range");
    }
    Advice a;
    a.nation = nation;
    a.bloch = network_.bloch(nation);
    a.eliminated = world_.eliminated(nation);
    if (a.eliminated) {
        return a;
    }
    auto land = land_neighbours();
    PairSet pairs = decision_pairs(land);
    // Advice always reads the exact state so it never touches a sampling stream.
    auto snap = exact_snapshot(network_, pairs);
    NeighbourMap mine{{nation, land[nation]}};
    a.table = payoffs(snap, mine);
    auto feasible = feasible_tactics(nation, land);
    if (!feasible.empty()) {
        a.tactic = select_action(nation, a.table, feasible);
        a.cell = choose_cell(world_, nation, *a.tactic, borders(world_, nation));
    }
    return a;
}

const RoundRecord& Simulation::advance(const std::map<int, Cell>& human_placements) {
    if (finished()) {
        throw ConfigError("run already finished");
    }
    const int n = config_.nations();
    const int round = rounds_done() + 1;
    const WorldMap start = world_;

    RoundRecord rec;
    rec.round = round;
    rec.tactics.assign(static_cast<std::size_t>(n), "");

    // (1) decision tomography
    const NeighbourMap land = land_neighbours();
    const TomographySnapshot snapshot = decision_snapshot();
    const double slack = config_.tomography == TomographyMode::Exact ? kBlochSlack : sampled_tolerance(config_.shots);
    if (auto v = snapshot.violation(slack); !v.empty()) {
        throw TomographyError("snapshot violates physical bounds: " + v);
    }
    rec.snapshot = snapshot.to_json();

    NeighbourMap ai;
    for (int j = 0; j < n; ++j) {
        if (!world_.eliminated(j) && !is_human(j)) ai[j] = land.at(j);
    }
    const PayoffTable table = payoffs(snapshot, ai);

    // (2) placements in ascending nation order
    for (int j = 0; j < n; ++j) {
        auto& tactic_name = rec.tactics[static_cast<std::size_t>(j)];
        if (world_.eliminated(j)) {
            tactic_name = "eliminated";
            continue;
        }
        if (is_human(j)) {
            auto it = human_placements.find(j);
            if (it == human_placements.end()) {
                tactic_name = "human:skip";
                continue;
            }
            auto rejection = check_cell(world_, j, it->second);
            if (rejection != PlacementRejection::None) {
                tactic_name = "human:rejected:" + to_string(rejection);
                continue;
            }
            auto placed = place_city_at(world_, j, it->second, round);
            if (!placed) {
                tactic_name = "human:capped";
                continue;
            }
            tactic_name = "human";
            rec.placements.push_back(*placed);
            continue;
        }
        auto feasible = feasible_tactics(j, land);
        if (feasible.empty()) {
            tactic_name = "none";
            continue;
        }
        Tactic t = select_action(j, table, feasible);
        auto placed = place_city(world_, j, t, round);
        if (!placed) {
            tactic_name = "none";
            continue;
        }
        tactic_name = t.to_string();
        rec.placements.push_back(*placed);
    }

    // (3) transfers drive two-qubit gates, or a defeat rotation off the coupling map
    // Captures and lost ground can leave a nation above its cap; it razes down
    // to the cap, which may in turn move more cities.
    for (;;) {
        auto moved = resolve_transfers(world_);
        rec.transfers.insert(rec.transfers.end(), moved.begin(), moved.end());
        bool razed = false;
        for (int j = 0; j < n; ++j) {
            for (Cell c : enforce_cap(world_, j)) {
                rec.upkeep.push_back({j, c, rec.transfers.size()});
                razed = true;
            }
        }
        if (!razed) break;
    }
    int salt = 0;
    for (const auto& t : rec.transfers) {
        const int loser = t.old_owner;
        const int winner = t.new_owner;
        if (config_.coupling.has_edge(loser, winner)) {
            TomographySnapshot local;
            local.singles.assign(static_cast<std::size_t>(n), BlochVector{});
            local.singles[static_cast<std::size_t>(loser)] = current_bloch(loser, round, salt++);
            local.singles[static_cast<std::size_t>(winner)] = current_bloch(winner, round, salt++);
            auto [rl, rw] = war_gate(network_, local, loser, winner);
            rec.gates.push_back({GateEvent::Kind::War, loser, winner, {rl, rw}, kDefendPole, 1.0});
        } else if (!is_opponent(loser)) {
            AxisAngle r = defeat_rotation(network_, current_bloch(loser, round, salt++), loser);
            rec.gates.push_back({GateEvent::Kind::Defeat, loser, -1, {r}, kDefendPole, 1.0});
        }
    }

    // (4) statistics and feedback rotations for standard nations
    rec.stats.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        rec.stats[static_cast<std::size_t>(j)] = stats(start, world_, j);
    }
    for (int j = 0; j < n; ++j) {
        if (is_opponent(j) || world_.eliminated(j)) continue;
        auto directive = feedback_directive(j, rec.stats[static_cast<std::size_t>(j)], config_.map.radius);
        if (!directive) continue;
        AxisAngle r = synthesize_rotation(current_bloch(j, round, salt++), directive->target, directive->fraction);
        network_.apply_1q(j, r);
        rec.gates.push_back({GateEvent::Kind::Feedback, j, -1, {r}, directive->target, directive->fraction});
    }

    rec.bloch.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) rec.bloch.push_back(network_.bloch(j));

    records_.push_back(std::move(rec));
    return records_.back();
}

ojson Simulation::history_json() const {
    ojson doc;
    doc["format_version"] = kHistoryFormatVersion;
    doc["config"] = config_.to_json();
    auto lay = ojson::array();
    for (Cell c : layout_) lay.push_back(cell_json(c));
    doc["layout"] = lay;
    auto groups = ojson::array();
    for (int j = 0; j < config_.nations(); ++j) groups.push_back(group(j));
    doc["groups"] = groups;
    auto rounds = ojson::array();
    for (const auto& r : records_) rounds.push_back(r.to_json());
    doc["rounds"] = rounds;
    return doc;
}

std::string Simulation::history_text() const { return history_json().dump(1) + "\n"; }

Simulation run_generate(const RunConfig& config, const PlacementScript& script) {
    Simulation sim(config);
    while (!sim.finished()) {
        auto it = script.find(sim.rounds_done() + 1);
        sim.advance(it == script.end() ? std::map<int, Cell>{} : it->second);
    }
    return sim;
}

WorldMap replay_world(const nlohmann::json& history, int round) {
    if (history.value("format_version", 0) != kHistoryFormatVersion) {
        throw ConfigError("unsupported history format version");
    }
    RunConfig config = RunConfig::from_json(history.at("config"));
    WorldMap world(config.map, config.nations());
    const auto& layout = history.at("layout");
    for (int j = 0; j < config.nations(); ++j) {
        world.add_city({j, cell_from_json(layout.at(static_cast<std::size_t>(j))), true, 0});
    }
    const auto& rounds = history.at("rounds");
    if (round < 0 || round > static_cast<int>(rounds.size())) {
        throw ConfigError("history has no round " + std::to_string(round));
    }
    for (int r = 0; r < round; ++r) {
        RoundRecord rec = RoundRecord::from_json(rounds.at(static_cast<std::size_t>(r)));
        for (const auto& p : rec.placements) {
            for (Cell c : p.razed) {
                auto ci = world.city_at(c);
                if (!ci) throw ConfigError("history razes a city that does not exist");
                world.raze_city(*ci);
            }
            world.add_city({p.nation, p.pos, false, rec.round});
        }
        std::size_t next_upkeep = 0;
        auto upkeep_until = [&](std::size_t applied) {
            while (next_upkeep < rec.upkeep.size() && rec.upkeep[next_upkeep].after_transfers <= applied) {
                auto ci = world.city_at(rec.upkeep[next_upkeep].pos);
                if (!ci) throw ConfigError("history razes a city that does not exist");
                world.raze_city(*ci);
                ++next_upkeep;
            }
        };
        for (std::size_t i = 0; i < rec.transfers.size(); ++i) {
            upkeep_until(i);
            auto ci = world.city_at(rec.transfers[i].pos);
            if (!ci) throw ConfigError("history transfers a city that does not exist");
            world.set_city_owner(*ci, rec.transfers[i].new_owner);
        }
        upkeep_until(rec.transfers.size());
    }
    return world;
}

}  // namespace qmap
