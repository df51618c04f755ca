#include "qmap/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

namespace qmap {

std::string Tactic::to_string() const {
    switch (kind) {
        case Kind::Defend: return "defend:" + std::to_string(target);
        case Kind::Attack: return "attack:" + std::to_string(target);
        default: return "explore";
    }
}

Tactic Tactic::parse(const std::string& s) {
    if (s == "explore") {
        return explore();
    }
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        std::string head = s.substr(0, colon);
        int k = std::stoi(s.substr(colon + 1));
        if (head == "defend") return defend(k);
        if (head == "attack") return attack(k);
    }
    throw PolicyError("cannot parse tactic '" + s + "'");
}

double PayoffTable::at(int j, int k, PauliAxis p) const {
    auto it = entries.find({j, k, p});
    if (it == entries.end()) {
        throw PolicyError("payoff table has no entry for nation " + std::to_string(j) + " vs " + std::to_string(k));
    }
    return it->second;
}

nlohmann::ordered_json PayoffTable::to_json(std::optional<int> nation) const {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& [key, e] : entries) {
        auto [j, k, p] = key;
        if (nation && *nation != j) {
            continue;
        }
        rows.push_back({{"j", j}, {"k", k}, {"P", std::string(1, axis_char(p))}, {"E", e}});
    }
    return rows;
}

PayoffTable payoffs(const TomographySnapshot& snapshot, const NeighbourMap& neighbours) {
    PayoffTable table;
    for (const auto& [j, ks] : neighbours) {
        if (j < 0 || j >= snapshot.size()) {
            throw PolicyError("nation " + std::to_string(j) + " is not in the snapshot");
        }
        const BlochVector& single = snapshot.singles[static_cast<std::size_t>(j)];
        if (ks.empty()) {
            for (PauliAxis p : kAllAxes) {
                table.entries[{j, kNoNeighbour, p}] = single[p];
            }
            continue;
        }
        for (int k : ks) {
            if (!snapshot.has_pair(j, k)) {
                throw PolicyError("tomography contract breach: snapshot lacks pair (" + std::to_string(j) + "," +
                                  std::to_string(k) + ")");
            }
            for (PauliAxis p : kAllAxes) {
                double e = single[p];
                for (PauliAxis q : kAllAxes) {
                    e += snapshot.correlation(j, p, k, q);
                }
                table.entries[{j, k, p}] = e;
            }
        }
    }
    return table;
}

std::optional<Tactic> tactic_for_entry(int k, PauliAxis p) {
    switch (p) {
        case PauliAxis::Y: return Tactic::explore();
        case PauliAxis::X:
            if (k == kNoNeighbour) return std::nullopt;
            return Tactic::defend(k);
        default:
            if (k == kNoNeighbour) return std::nullopt;
            return Tactic::attack(k);
    }
}

Tactic select_action(int j, const PayoffTable& table, const std::set<Tactic>& feasible) {
    if (feasible.empty()) {
        throw PolicyError("nation " + std::to_string(j) + " has no feasible tactic");
    }
    struct Row {
        double e;
        PauliAxis p;
        int k;
        Tactic t;
    };
    std::vector<Row> rows;
    double best = -std::numeric_limits<double>::infinity();
    for (auto it = table.entries.lower_bound({j, std::numeric_limits<int>::min(), PauliAxis::X});
         it != table.entries.end() && std::get<0>(it->first) == j; ++it) {
        auto [jj, k, p] = it->first;
        auto t = tactic_for_entry(k, p);
        if (!t || !feasible.count(*t)) continue;
        rows.push_back({it->second, p, k, *t});
        best = std::max(best, it->second);
    }
    const Row* pick = nullptr;
    for (const auto& row : rows) {
        if (row.e < best - kPayoffTieTolerance) continue;
        if (!pick || row.p < pick->p || (row.p == pick->p && row.k < pick->k)) pick = &row;
    }
    if (!pick) {
        throw PolicyError("no payoff row of nation " + std::to_string(j) + " maps to a feasible tactic");
    }
    return pick->t;
}

AxisAngle synthesize_rotation(const BlochVector& current, const BlochVector& target, double fraction) {
    if (fraction < 0.0 || fraction > 1.0) {
        throw PolicyError("rotation fraction must lie in [0, 1]");
    }
    double cn = current.norm();
    if (cn < 1e-6) {
        spdlog::debug("Bloch vector too short ({}) to rotate; using identity", cn);
        return AxisAngle::identity();
    }
    double tn = target.norm();
    if (tn == 0.0) {
        throw PolicyError("rotation target must be nonzero");
    }
    BlochVector axis = cross(current, target);
    double sin_part = axis.norm();
    double cos_part = dot(current, target);
    double theta = std::atan2(sin_part, cos_part);
    if (sin_part <= 1e-12 * cn * tn) {
        if (cos_part > 0.0) {
            return AxisAngle::identity();
        }
        // Antiparallel: fixed perpendicular axis.
        axis = cross(current, BlochVector{1.0, 0.0, 0.0});
        if (axis.norm() <= 1e-9 * cn) {
            axis = cross(current, BlochVector{0.0, 1.0, 0.0});
        }
        theta = std::numbers::pi;
    }
    double angle = fraction * theta;
    if (angle == 0.0) {
        return AxisAngle::identity();
    }
    return {normalized(axis), angle};
}

std::optional<FeedbackDirective> feedback_directive(int nation, const NationStats& stats, double radius) {
    if (stats.frontier < 0 || stats.lost < 0 || stats.gained < 0 || stats.area < 0) {
        throw PolicyError("nation statistics must be non-negative");
    }
    if (radius <= 0.0) {
        throw PolicyError("radius must be positive");
    }
    if (stats.frontier == 0 && stats.lost == 0 && stats.gained == 0) {
        return std::nullopt;
    }
    const double disc = std::numbers::pi * radius * radius;
    long best = std::max({stats.frontier, stats.lost, stats.gained});
    if (stats.frontier == best) {
        return FeedbackDirective{nation, kExplorePole, 0.25};
    }
    if (stats.lost == best) {
        return FeedbackDirective{nation, kDefendPole, std::min(1.0, static_cast<double>(stats.lost) / disc)};
    }
    return FeedbackDirective{nation, kAttackPole, std::min(1.0, static_cast<double>(stats.gained) / disc)};
}

std::pair<AxisAngle, AxisAngle> war_gate(NetworkState& state, const TomographySnapshot& snapshot, int j, int k) {
    if (!state.coupling().has_edge(j, k)) {
        throw PolicyError("war gate needs a coupling edge between " + std::to_string(j) + " and " +
                          std::to_string(k));
    }
    AxisAngle rj = synthesize_rotation(snapshot.singles.at(static_cast<std::size_t>(j)), kDefendPole, 1.0);
    AxisAngle rk = synthesize_rotation(snapshot.singles.at(static_cast<std::size_t>(k)), kDefendPole, 1.0);
    state.apply_1q(j, rj);
    state.apply_1q(k, rk);
    state.apply_cz(j, k);
    return {rj, rk};
}

AxisAngle defeat_rotation(NetworkState& state, const BlochVector& current, int j) {
    AxisAngle r = synthesize_rotation(current, kDefendPole, 1.0);
    state.apply_1q(j, r);
    return r;
}

}  // namespace qmap
