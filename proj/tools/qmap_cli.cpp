// qmap: command-line front door for the quantum nation-map engine.
//
//   qmap generate   --coupling FILE [...] --out DIR   autonomous run -> history + images
//   qmap experiment --coupling FILE --runs M [...]    opponent study -> summary
//   qmap serve      --port P [--history-dir DIR]      HTTP session service (/v1)
//   qmap render     --history FILE --out DIR          history -> image sequence
//   qmap layout     --coupling FILE [...]             initial capital layout as JSON

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "qmap/engine.hpp"
#include "qmap/image.hpp"
#include "qmap/service.hpp"

namespace fs = std::filesystem;
using namespace qmap;

namespace {

struct CommonFlags {
    std::string coupling;
    int size = 256;
    double radius = 5.0;
    int rounds = 20;
    std::uint64_t seed = 1;
    std::string tomography = "exact";
    int shots = 8192;
    std::vector<int> humans;
    std::optional<std::uint64_t> layout_seed;
    std::optional<double> layout_spacing;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool rounds = true) {
    cmd->add_option("--coupling", f.coupling, "Coupling map JSON file {\"n\", \"edges\"}")->required();
    cmd->add_option("--size", f.size, "Grid side length L")->capture_default_str();
    cmd->add_option("--radius", f.radius, "City radius r")->capture_default_str();
    if (rounds) cmd->add_option("--rounds", f.rounds, "Number of rounds")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    cmd->add_option("--tomography", f.tomography, "exact | sampled")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    cmd->add_option("--shots", f.shots, "Shots per measurement setting (sampled tomography)")
        ->capture_default_str();
    cmd->add_option("--layout-seed", f.layout_seed, "Seed of the force-directed layout (defaults to --seed)");
    cmd->add_option("--layout-spacing", f.layout_spacing,
                    "Mean capital distance across coupling edges in cells (default 5r; 0 fills the grid)");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig c;
    c.coupling = CouplingMap::load(f.coupling);
    c.map.size = f.size;
    c.map.radius = f.radius;
    c.rounds = f.rounds;
    c.seed = f.seed;
    c.tomography = tomography_mode_from_string(f.tomography);
    c.shots = f.shots;
    c.humans = {f.humans.begin(), f.humans.end()};
    c.layout_seed = f.layout_seed.value_or(f.seed);
    c.layout_spacing = f.layout_spacing;
    c.validate();
    return c;
}

// {"<round>": {"<nation>": [x, y], ...}, ...}
PlacementScript load_script(const std::string& path) {
    PlacementScript script;
    auto doc = nlohmann::json::parse(read_text(path));
    for (const auto& [round, per_nation] : doc.items()) {
        for (const auto& [nation, cell] : per_nation.items()) {
            script[std::stoi(round)][std::stoi(nation)] = Cell{cell.at(0).get<int>(), cell.at(1).get<int>()};
        }
    }
    return script;
}

std::string frame_name(int round, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "round_%03d.%s", round, ext);
    return buf;
}

void write_frames(const WorldMap& world, int round, const fs::path& out, int scale) {
    write_file(out / frame_name(round, "ppm"), render_ppm(world, scale));
    write_file(out / frame_name(round, "snap"), encode_snapshot(world, round));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-correlated nation map generator"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")->capture_default_str();

    CommonFlags gen_flags;
    std::string gen_out = "out";
    std::string gen_placements;
    int gen_scale = 1;
    auto* gen = app.add_subcommand("generate", "Autonomous run: history file plus one map image per round");
    add_common(gen, gen_flags);
    gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
    gen->add_option("--humans", gen_flags.humans, "Nations whose placements come from --placements");
    gen->add_option("--placements", gen_placements, "Scripted human placements JSON");
    std::string gen_opponents = "off";
    gen->add_option("--opponents", gen_opponents, "off | on | colorA | colorB (on = colorA)")
        ->check(CLI::IsMember({"off", "on", "none", "colorA", "colorB"}))
        ->capture_default_str();
    gen->add_option("--scale", gen_scale, "Pixels per cell in the images")->capture_default_str();

    CommonFlags exp_flags;
    std::string exp_out = "out";
    int exp_runs = 10;
    std::string exp_opponents = "on";
    int exp_threads = 0;
    auto* exp = app.add_subcommand("experiment", "Opponent study over seeded runs: per-round group summary");
    add_common(exp, exp_flags);
    exp->add_option("--runs", exp_runs, "Number of runs")->capture_default_str();
    exp->add_option("--opponents", exp_opponents, "on | off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    exp->add_option("--threads", exp_threads, "Worker threads (0 = all cores)")->capture_default_str();
    exp->add_option("--out", exp_out, "Output directory")->capture_default_str();

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string history_dir;
    auto* serve = app.add_subcommand("serve", "Start the HTTP session service");
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--port", port, "Port")->capture_default_str();
    serve->add_option("--history-dir", history_dir, "Write finished histories here");

    std::string render_history;
    std::string render_out = "out";
    int render_scale = 1;
    auto* render = app.add_subcommand("render", "Render a history file as an image sequence");
    render->add_option("--history", render_history, "History JSON file")->required();
    render->add_option("--out", render_out, "Output directory")->capture_default_str();
    render->add_option("--scale", render_scale, "Pixels per cell")->capture_default_str();

    CommonFlags layout_flags;
    std::string layout_out;
    auto* layout = app.add_subcommand("layout", "Emit the initial capital layout as JSON");
    add_common(layout, layout_flags, false);
    layout->add_option("--out", layout_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*gen) {
            RunConfig config = build_config(gen_flags);
            if (gen_opponents == "on") gen_opponents = "colorA";
            if (gen_opponents == "off") gen_opponents = "none";
            config.opponents = opponent_coloring_from_string(gen_opponents);
            config.validate();
            PlacementScript script;
            if (!gen_placements.empty()) script = load_script(gen_placements);
            fs::create_directories(gen_out);
            Simulation sim(config);
            write_frames(sim.world(), 0, gen_out, gen_scale);
            while (!sim.finished()) {
                int next = sim.rounds_done() + 1;
                auto it = script.find(next);
                sim.advance(it == script.end() ? std::map<int, Cell>{} : it->second);
                write_frames(sim.world(), next, gen_out, gen_scale);
            }
            write_file(fs::path(gen_out) / "history.json", sim.history_text());
            std::cout << "wrote " << config.rounds << " rounds to " << gen_out << "\n";
        } else if (*exp) {
            ExperimentConfig ec;
            ec.base = build_config(exp_flags);
            ec.runs = exp_runs;
            ec.opponents = exp_opponents == "on";
            ec.threads = exp_threads;
            if (ec.runs < 1) throw ConfigError("--runs must be at least 1");
            ExperimentSummary summary = run_experiment(ec);
            fs::create_directories(exp_out);
            write_file(fs::path(exp_out) / "summary.csv", summary.to_csv());
            write_file(fs::path(exp_out) / "summary.json", summary.to_json().dump(1) + "\n");
            std::cout << "final mean area:";
            for (const char* g : {"standard", "opponent"}) {
                bool present = false;
                for (const auto& row : summary.rows) present = present || row.group == g;
                if (present) std::cout << ' ' << g << '=' << summary.final_mean(g);
            }
            std::cout << "\n";
        } else if (*serve) {
            std::optional<fs::path> dir;
            if (!history_dir.empty()) {
                fs::create_directories(history_dir);
                dir = history_dir;
            }
            SessionManager sessions(dir);
            httplib::Server server;
            register_routes(server, sessions);
            std::cout << "listening on http://" << host << ':' << port << "/v1\n" << std::flush;
            if (!server.listen(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
        } else if (*render) {
            auto history = nlohmann::json::parse(read_text(render_history));
            int rounds = static_cast<int>(history.at("rounds").size());
            fs::create_directories(render_out);
            for (int r = 0; r <= rounds; ++r) {
                write_file(fs::path(render_out) / frame_name(r, "ppm"), render_ppm(replay_world(history, r), render_scale));
            }
            std::cout << "rendered " << rounds + 1 << " frames to " << render_out << "\n";
        } else if (*layout) {
            RunConfig config = build_config(layout_flags);
            auto cells = initial_layout(config.coupling, config.map, config.layout_seed, config.spacing(),
                                        config.layout_positions);
            nlohmann::ordered_json doc;
            doc["size"] = config.map.size;
            doc["radius"] = config.map.radius;
            auto arr = nlohmann::ordered_json::array();
            for (Cell c : cells) arr.push_back({c.x, c.y});
            doc["capitals"] = arr;
            std::string text = doc.dump(1) + "\n";
            if (layout_out.empty()) {
                std::cout << text;
            } else {
                write_file(layout_out, text);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "qmap: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
