#include "qmap/service.hpp"

#include <httplib.h>

#include <spdlog/spdlog.h>

#include "qmap/image.hpp"

namespace qmap {

namespace {

using ojson = nlohmann::ordered_json;

SessionManager::Response error(int status, const std::string& message) {
    return {status, ojson{{"error", message}}};
}

ojson cell_json(Cell c) { return ojson::array({c.x, c.y}); }

}  // namespace

SessionManager::SessionManager(std::optional<std::filesystem::path> history_dir)
    : history_dir_(std::move(history_dir)) {}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<int> SessionManager::waiting_for(const Session& s) const {
    std::vector<int> out;
    if (s.sim.finished()) return out;
    for (int h : s.sim.config().humans) {
        if (!s.sim.world().eliminated(h) && !s.pending.count(h)) out.push_back(h);
    }
    return out;
}

ojson SessionManager::render_model(const Session& s, bool advancing) const {
    const Simulation& sim = s.sim;
    const WorldMap& world = sim.world();
    ojson doc;
    doc["id"] = s.id;
    doc["round"] = sim.rounds_done();
    doc["rounds"] = sim.config().rounds;
    doc["phase"] = sim.finished() ? "finished" : advancing ? "advancing" : "awaiting-input";
    doc["waiting_for"] = waiting_for(s);
    doc["size"] = world.size();
    doc["radius"] = world.config().radius;

    std::vector<int> grid(world.ownership().begin(), world.ownership().end());
    auto runs = ojson::array();
    for (auto [v, c] : rle_encode(grid)) runs.push_back(ojson::array({v, c}));
    doc["ownership_rle"] = runs;

    auto cities = ojson::array();
    for (const City& c : world.cities()) {
        cities.push_back({{"owner", c.owner},
                          {"cell", cell_json(c.pos)},
                          {"capital", c.is_capital},
                          {"placed_round", c.placed_round}});
    }
    doc["cities"] = cities;
    auto ruins = ojson::array();
    for (Cell c : world.ruins()) ruins.push_back(cell_json(c));
    doc["ruins"] = ruins;

    auto nations = ojson::array();
    const auto all = all_borders(world);
    for (int j = 0; j < sim.config().nations(); ++j) {
        NationStats st;
        if (!sim.records().empty()) {
            st = sim.records().back().stats[static_cast<std::size_t>(j)];
        } else {
            st.area = world.area(j);
            st.frontier = static_cast<long>(all[static_cast<std::size_t>(j)].frontier.size());
        }
        BlochVector b = sim.network().bloch(j);
        nations.push_back({{"nation", j},
                           {"group", sim.group(j)},
                           {"eliminated", world.eliminated(j)},
                           {"city_count", world.city_count(j)},
                           {"stats", {{"A", st.area}, {"f", st.frontier}, {"A_l", st.lost}, {"A_g", st.gained}}},
                           {"bloch", ojson::array({b.x, b.y, b.z})}});
    }
    doc["nations"] = nations;
    auto pending = ojson::array();
    for (const auto& [j, c] : s.pending) pending.push_back({{"nation", j}, {"cell", cell_json(c)}});
    doc["pending"] = pending;
    return doc;
}

SessionManager::Response SessionManager::create(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        return error(400, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) return error(400, "run config must be an object");
    if (auto key = RunConfig::unknown_field(doc)) return error(400, "unknown field '" + *key + "'");
    RunConfig config;
    try {
        config = RunConfig::from_json(doc);
    } catch (const std::exception& e) {
        return error(422, e.what());
    }
    std::shared_ptr<Session> session;
    try {
        std::lock_guard lock(mutex_);
        std::string id = "s" + std::to_string(next_id_++);
        session = std::make_shared<Session>(id, std::move(config));
        sessions_[id] = session;
    } catch (const std::exception& e) {
        return error(422, e.what());
    }
    std::lock_guard lock(session->mutex);
    return {201, ojson{{"id", session->id}, {"state", render_model(*session, false)}}};
}

SessionManager::Response SessionManager::state(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "unknown session");
    bool advancing = !s->advance_mutex.try_lock();
    if (!advancing) s->advance_mutex.unlock();
    std::lock_guard lock(s->mutex);
    return {200, render_model(*s, advancing)};
}

SessionManager::Response SessionManager::advisor(const std::string& id, int nation) {
    auto s = find(id);
    if (!s) return error(404, "unknown session");
    std::lock_guard lock(s->mutex);
    if (nation < 0 || nation >= s->sim.config().nations()) {
        return error(404, "unknown nation");
    }
    Advice a = s->sim.advise(nation);
    ojson doc;
    doc["nation"] = nation;
    doc["group"] = s->sim.group(nation);
    doc["eliminated"] = a.eliminated;
    doc["bloch"] = ojson::array({a.bloch.x, a.bloch.y, a.bloch.z});
    doc["rows"] = a.table.to_json(nation);
    if (a.tactic) {
        ojson suggestion;
        suggestion["tactic"] = a.tactic->to_string();
        suggestion["cell"] = a.cell ? cell_json(*a.cell) : ojson(nullptr);
        doc["suggested"] = suggestion;
    } else {
        doc["suggested"] = nullptr;
    }
    return {200, doc};
}

SessionManager::Response SessionManager::submit_placement(const std::string& id, const std::string& body) {
    auto s = find(id);
    if (!s) return error(404, "unknown session");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        return error(400, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) return error(400, "placement must be an object");
    for (const auto& [key, v] : doc.items()) {
        if (key != "nation" && key != "cell") return error(400, "unknown field '" + key + "'");
    }
    int nation = 0;
    Cell cell;
    try {
        nation = doc.at("nation").get<int>();
        const auto& c = doc.at("cell");
        if (!c.is_array() || c.size() != 2) return error(400, "cell must be [x, y]");
        cell = {c[0].get<int>(), c[1].get<int>()};
    } catch (const nlohmann::json::exception& e) {
        return error(400, std::string("malformed placement: ") + e.what());
    }

    std::lock_guard lock(s->mutex);
    auto reject = [](PlacementRejection r) {
        return Response{422, ojson{{"status", "rejected"}, {"reason", to_string(r)}}};
    };
    if (s->sim.finished()) return error(409, "session finished");
    if (!s->sim.is_human(nation)) return reject(PlacementRejection::NotHuman);
    auto r = check_cell(s->sim.world(), nation, cell);
    if (r != PlacementRejection::None) return reject(r);
    for (const auto& [other, c] : s->pending) {
        if (other != nation && c == cell) return reject(PlacementRejection::Occupied);
    }
    s->pending[nation] = cell;
    return {200, ojson{{"status", "accepted"}, {"nation", nation}, {"cell", cell_json(cell)}}};
}

SessionManager::Response SessionManager::advance(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "unknown session");
    std::unique_lock advance_lock(s->advance_mutex, std::try_to_lock);
    if (!advance_lock.owns_lock()) return error(409, "advance already in progress");
    std::lock_guard lock(s->mutex);
    if (s->sim.finished()) return error(409, "session finished");
    auto waiting = waiting_for(*s);
    if (!waiting.empty()) {
        return {409, ojson{{"error", "awaiting input"}, {"waiting", waiting}}};
    }
    try {
        const RoundRecord& rec = s->sim.advance(s->pending);
        s->pending.clear();
        if (s->sim.finished() && history_dir_) {
            write_file(*history_dir_ / (s->id + ".json"), s->sim.history_text());
        }
        return {200, rec.to_json()};
    } catch (const std::exception& e) {
        spdlog::error("session {} failed to advance: {}", s->id, e.what());
        return error(500, e.what());
    }
}

SessionManager::Response SessionManager::history(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "unknown session");
    std::lock_guard lock(s->mutex);
    return {200, s->sim.history_text()};
}

void register_routes(httplib::Server& server, SessionManager& sessions) {
    auto reply = [](httplib::Response& res, const SessionManager::Response& r) {
        res.status = r.status;
        res.set_content(r.raw ? *r.raw : r.body.dump(), "application/json");
    };
    server.Post("/v1/sessions", [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, sessions.create(req.body));
    });
    server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/state)",
               [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
                   reply(res, sessions.state(req.matches[1]));
               });
    server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/advisor/(-?\d+))",
               [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
                   reply(res, sessions.advisor(req.matches[1], std::stoi(req.matches[2])));
               });
    server.Post(R"(/v1/sessions/([A-Za-z0-9]+)/placements)",
                [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
                    reply(res, sessions.submit_placement(req.matches[1], req.body));
                });
    server.Post(R"(/v1/sessions/([A-Za-z0-9]+)/advance)",
                [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
                    reply(res, sessions.advance(req.matches[1]));
                });
    server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/history)",
               [&sessions, reply](const httplib::Request& req, httplib::Response& res) {
                   reply(res, sessions.history(req.matches[1]));
               });
}

}  // namespace qmap
