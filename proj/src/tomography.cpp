#include "qmap/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmap/seed.hpp"

namespace qmap {

void PairSet::insert(int a, int b) {
    if (a == b) {
        throw TomographyError("pair set cannot contain a self-pair");
    }
    pairs_.insert(make_pair_sorted(a, b));
}

void PairSet::validate(int n) const {
    for (auto [a, b] : pairs_) {
        if (a < 0 || b >= n) {
            throw TomographyError("pair (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        }
    }
}

bool MeasurementPlan::covers(const PairSet& required) const {
    for (auto [j, k] : required.pairs()) {
        for (PauliAxis p : kAllAxes) {
            for (PauliAxis q : kAllAxes) {
                bool hit = std::any_of(settings.begin(), settings.end(), [&](const auto& s) {
                    return s[static_cast<std::size_t>(j)] == p && s[static_cast<std::size_t>(k)] == q;
                });
                if (!hit) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::string to_string(TomographyMode m) { return m == TomographyMode::Exact ? "exact" : "sampled"; }

TomographyMode tomography_mode_from_string(const std::string& s) {
    if (s == "exact") return TomographyMode::Exact;
    if (s == "sampled") return TomographyMode::Sampled;
    throw TomographyError("unknown tomography mode '" + s + "'");
}

// ---------------------------------------------------------------------------

double TomographySnapshot::correlation(int j, PauliAxis p, int k, PauliAxis q) const {
    auto key = j < k ? std::tuple{j, k, p, q} : std::tuple{k, j, q, p};
    auto it = correlations_.find(key);
    if (it == correlations_.end()) {
        throw TomographyError("snapshot has no correlation for pair (" + std::to_string(j) + "," +
                              std::to_string(k) + ")");
    }
    return it->second;
}

bool TomographySnapshot::has_pair(int j, int k) const {
    auto [a, b] = make_pair_sorted(j, k);
    return correlations_.count({a, b, PauliAxis::X, PauliAxis::X}) != 0;
}

void TomographySnapshot::set_correlation(int j, PauliAxis p, int k, PauliAxis q, double value) {
    auto key = j < k ? std::tuple{j, k, p, q} : std::tuple{k, j, q, p};
    correlations_[key] = value;
}

std::vector<QubitPair> TomographySnapshot::pairs() const {
    std::vector<QubitPair> out;
    for (const auto& [key, v] : correlations_) {
        QubitPair pr{std::get<0>(key), std::get<1>(key)};
        if (out.empty() || out.back() != pr) {
            out.push_back(pr);
        }
    }
    return out;
}

nlohmann::ordered_json TomographySnapshot::to_json() const {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (int q = 0; q < size(); ++q) {
        for (PauliAxis p : kAllAxes) {
            doc["q" + std::to_string(q) + ":" + axis_char(p)] = singles[static_cast<std::size_t>(q)][p];
        }
    }
    for (const auto& [key, v] : correlations_) {
        auto [j, k, p, q] = key;
        doc["q" + std::to_string(j) + "q" + std::to_string(k) + ":" + axis_char(p) + axis_char(q)] = v;
    }
    return doc;
}

std::string TomographySnapshot::violation(double slack) const {
    for (int q = 0; q < size(); ++q) {
        const auto& b = singles[static_cast<std::size_t>(q)];
        double s = b.x * b.x + b.y * b.y + b.z * b.z;
        if (s > 1.0 + slack) {
            std::ostringstream os;
            os << "qubit " << q << " Bloch norm^2 " << s << " exceeds 1";
            return os.str();
        }
    }
    for (auto [j, k] : pairs()) {
        // Both orientations: fix the factor on one qubit, sum over the other.
        for (int side = 0; side < 2; ++side) {
            for (PauliAxis fixed : kAllAxes) {
                double s = 0.0;
                for (PauliAxis free : kAllAxes) {
                    double c = side == 0 ? correlation(j, free, k, fixed) : correlation(j, fixed, k, free);
                    s += c * c;
                }
                if (s > 1.0 + slack) {
                    std::ostringstream os;
                    os << "pair (" << j << "," << k << ") correlation sphere norm^2 " << s << " exceeds 1";
                    return os.str();
                }
            }
        }
    }
    return {};
}

TomographySnapshot exact_snapshot(const NetworkState& state, const PairSet& pairs) {
    pairs.validate(state.size());
    TomographySnapshot snap;
    snap.mode = TomographyMode::Exact;
    snap.singles.reserve(static_cast<std::size_t>(state.size()));
    for (int q = 0; q < state.size(); ++q) {
        snap.singles.push_back(state.bloch(q));
    }
    for (auto [j, k] : pairs.pairs()) {
        for (PauliAxis p : kAllAxes) {
            for (PauliAxis q : kAllAxes) {
                snap.set_correlation(j, p, k, q, state.expect(p, j, q, k));
            }
        }
    }
    return snap;
}

std::vector<int> greedy_coloring(const PairSet& pairs, int n) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [a, b] : pairs.pairs()) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    // Largest degree first, ties by index.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[static_cast<std::size_t>(q)] = q;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return adj[static_cast<std::size_t>(a)].size() > adj[static_cast<std::size_t>(b)].size();
    });
    std::vector<int> color(static_cast<std::size_t>(n), -1);
    for (int q : order) {
        std::vector<char> taken(static_cast<std::size_t>(n) + 1, 0);
        for (int nb : adj[static_cast<std::size_t>(q)]) {
            int c = color[static_cast<std::size_t>(nb)];
            if (c >= 0) taken[static_cast<std::size_t>(c)] = 1;
        }
        int c = 0;
        while (taken[static_cast<std::size_t>(c)]) ++c;
        color[static_cast<std::size_t>(q)] = c;
    }
    return color;
}

MeasurementPlan plan_settings(const PairSet& pairs, int n, int shots_per_setting) {
    pairs.validate(n);
    if (shots_per_setting < 1) {
        throw TomographyError("shots per setting must be at least 1");
    }
    MeasurementPlan plan;
    plan.shots_per_setting = shots_per_setting;
    plan.pairs = pairs;

    std::vector<int> color = greedy_coloring(pairs, n);
    int colors = n == 0 ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    if (colors <= 1) {
        for (PauliAxis p : kAllAxes) {
            plan.settings.emplace_back(static_cast<std::size_t>(n), p);
        }
        return plan;
    }
    for (int lo = 0; lo < colors; ++lo) {
        for (int hi = lo + 1; hi < colors; ++hi) {
            for (PauliAxis p : kAllAxes) {
                for (PauliAxis q : kAllAxes) {
                    std::vector<PauliAxis> s(static_cast<std::size_t>(n), PauliAxis::Z);
                    for (int v = 0; v < n; ++v) {
                        if (color[static_cast<std::size_t>(v)] == lo) s[static_cast<std::size_t>(v)] = p;
                        if (color[static_cast<std::size_t>(v)] == hi) s[static_cast<std::size_t>(v)] = q;
                    }
                    plan.settings.push_back(std::move(s));
                }
            }
        }
    }
    return plan;
}

double sampled_tolerance(int shots_per_setting) { return 6.0 / std::sqrt(static_cast<double>(shots_per_setting)); }

TomographySnapshot sampled_snapshot(const NetworkState& state, const MeasurementPlan& plan, std::uint64_t seed) {
    const int n = state.size();
    plan.pairs.validate(n);
    if (!plan.covers(plan.pairs)) {
        throw TomographyError("measurement plan does not cover its pair set");
    }
    const std::size_t nq = static_cast<std::size_t>(n);

    // Accumulators: sum of +-1 values and counts.
    std::vector<std::array<std::int64_t, 3>> single_sum(nq, {0, 0, 0});
    std::vector<std::array<std::int64_t, 3>> single_cnt(nq, {0, 0, 0});
    std::map<std::tuple<int, int, PauliAxis, PauliAxis>, std::pair<std::int64_t, std::int64_t>> pair_acc;

    for (std::size_t si = 0; si < plan.settings.size(); ++si) {
        const auto& setting = plan.settings[si];
        std::mt19937_64 rng(derive_seed(seed, "tomography.setting", {si}));
        auto outcomes = state.sample(setting, plan.shots_per_setting, rng);

        std::vector<std::int64_t> ones(nq, 0);
        for (auto o : outcomes) {
            for (std::size_t q = 0; q < nq; ++q) {
                ones[q] += static_cast<std::int64_t>((o >> q) & 1U);
            }
        }
        const std::int64_t shots = static_cast<std::int64_t>(outcomes.size());
        for (std::size_t q = 0; q < nq; ++q) {
            auto a = static_cast<std::size_t>(setting[q]);
            single_sum[q][a] += shots - 2 * ones[q];
            single_cnt[q][a] += shots;
        }
        for (auto [j, k] : plan.pairs.pairs()) {
            std::int64_t agree = 0;
            for (auto o : outcomes) {
                agree += (((o >> j) ^ (o >> k)) & 1U) == 0 ? 1 : -1;
            }
            auto& acc = pair_acc[{j, k, setting[static_cast<std::size_t>(j)], setting[static_cast<std::size_t>(k)]}];
            acc.first += agree;
            acc.second += shots;
        }
    }

    TomographySnapshot snap;
    snap.mode = TomographyMode::Sampled;
    snap.singles.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        for (PauliAxis p : kAllAxes) {
            auto a = static_cast<std::size_t>(p);
            double v = single_cnt[q][a] == 0
                           ? 0.0
                           : static_cast<double>(single_sum[q][a]) / static_cast<double>(single_cnt[q][a]);
            snap.singles[q][p] = std::clamp(v, -1.0, 1.0);
        }
    }
    for (const auto& [key, acc] : pair_acc) {
        auto [j, k, p, q] = key;
        double v = static_cast<double>(acc.first) / static_cast<double>(acc.second);
        snap.set_correlation(j, p, k, q, std::clamp(v, -1.0, 1.0));
    }
    return snap;
}

}  // namespace qmap
