#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "qmap/engine.hpp"
#include "qmap/seed.hpp"

namespace qmap {

RunConfig experiment_run_config(const ExperimentConfig& config, int index) {
    RunConfig rc = config.base;
    const auto i = static_cast<std::uint64_t>(index);
    rc.seed = derive_seed(config.base.seed, "experiment.run", {i});
    // Consecutive runs share a layout and swap which bicoloring plays opponent.
    if (!config.base.layout_positions) {
        rc.layout_seed = derive_seed(config.base.seed, "experiment.layout", {i / 2});
    }
    if (config.opponents) {
        rc.opponents = index % 2 == 0 ? OpponentColoring::ColorA : OpponentColoring::ColorB;
    } else {
        rc.opponents = OpponentColoring::None;
    }
    rc.humans.clear();
    return rc;
}

namespace {

std::map<std::string, std::vector<double>> group_means(const Simulation& sim) {
    const int n = sim.config().nations();
    std::map<std::string, std::vector<double>> out;
    std::map<std::string, int> counts;
    for (int j = 0; j < n; ++j) counts[sim.group(j)]++;
    for (const auto& [g, c] : counts) out[g].assign(static_cast<std::size_t>(sim.rounds_done() + 1), 0.0);

    // Round 0 is the capitals-only map.
    WorldMap start(sim.config().map, n);
    for (int j = 0; j < n; ++j) start.add_city({j, sim.layout()[static_cast<std::size_t>(j)], true, 0});
    for (int j = 0; j < n; ++j) {
        out[sim.group(j)][0] += static_cast<double>(start.area(j));
    }
    for (const auto& rec : sim.records()) {
        for (int j = 0; j < n; ++j) {
            out[sim.group(j)][static_cast<std::size_t>(rec.round)] +=
                static_cast<double>(rec.stats[static_cast<std::size_t>(j)].area);
        }
    }
    for (auto& [g, series] : out) {
        for (double& v : series) v /= counts[g];
    }
    return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    if (config.runs < 1) {
        throw ConfigError("runs must be at least 1");
    }
    if (config.opponents && config.base.coupling.bicoloring().empty()) {
        throw ConfigError("bicoloring error: coupling map is not bipartite");
    }
    ExperimentSummary summary;
    summary.per_run.resize(static_cast<std::size_t>(config.runs));
    summary.colorings.resize(static_cast<std::size_t>(config.runs));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < config.runs; i = next++) {
            RunConfig rc = experiment_run_config(config, i);
            Simulation sim = run_generate(rc);
            summary.per_run[static_cast<std::size_t>(i)] = group_means(sim);
            summary.colorings[static_cast<std::size_t>(i)] = rc.opponents;
        }
    };
    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.runs);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    const int rounds = config.base.rounds;
    std::vector<std::string> groups = {"standard"};
    if (config.opponents) groups.push_back("opponent");
    for (int r = 0; r <= rounds; ++r) {
        for (const auto& g : groups) {
            double sum = 0.0;
            int count = 0;
            for (const auto& run : summary.per_run) {
                auto it = run.find(g);
                if (it == run.end()) continue;
                sum += it->second[static_cast<std::size_t>(r)];
                ++count;
            }
            if (count == 0) continue;
            double mean = sum / count;
            double var = 0.0;
            for (const auto& run : summary.per_run) {
                auto it = run.find(g);
                if (it == run.end()) continue;
                double d = it->second[static_cast<std::size_t>(r)] - mean;
                var += d * d;
            }
            summary.rows.push_back({r, g, mean, std::sqrt(var / count)});
        }
    }
    return summary;
}

double ExperimentSummary::final_mean(const std::string& group) const {
    const SummaryRow* best = nullptr;
    for (const auto& row : rows) {
        if (row.group == group && (!best || row.round > best->round)) best = &row;
    }
    if (!best) {
        throw ConfigError("summary has no group '" + group + "'");
    }
    return best->mean_area;
}

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

std::string ExperimentSummary::to_csv() const {
    std::string out = "round,group,mean_area,std_area\n";
    for (const auto& row : rows) {
        out += std::to_string(row.round) + ',' + row.group + ',' + shortest(row.mean_area) + ',' +
               shortest(row.std_area) + '\n';
    }
    return out;
}

nlohmann::ordered_json ExperimentSummary::to_json() const {
    nlohmann::ordered_json doc;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        arr.push_back({{"round", row.round}, {"group", row.group}, {"mean_area", row.mean_area}, {"std_area", row.std_area}});
    }
    doc["rows"] = arr;
    auto colorings_json = nlohmann::ordered_json::array();
    for (auto c : colorings) colorings_json.push_back(to_string(c));
    doc["colorings"] = colorings_json;
    return doc;
}

}  // namespace qmap
