#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qmap/engine.hpp"

namespace httplib {
class Server;
}

namespace qmap {

/// In-memory game sessions behind the /v1 HTTP API. Each method maps to one
/// endpoint and returns an HTTP status plus a JSON body, so the rules can be
/// exercised without a socket.
class SessionManager {
  public:
    struct Response {
        Response(int status_, nlohmann::ordered_json body_) : status(status_), body(std::move(body_)) {}
        Response(int status_, std::string raw_) : status(status_), raw(std::move(raw_)) {}

        int status = 200;
        nlohmann::ordered_json body;
        std::optional<std::string> raw;  // sent verbatim instead of `body`
    };

    explicit SessionManager(std::optional<std::filesystem::path> history_dir = std::nullopt);

    Response create(const std::string& body);
    Response state(const std::string& id);
    Response advisor(const std::string& id, int nation);
    Response submit_placement(const std::string& id, const std::string& body);
    Response advance(const std::string& id);
    Response history(const std::string& id);

  private:
    struct Session {
        std::string id;
        std::mutex mutex;          // serializes all access
        std::mutex advance_mutex;  // held for the duration of an advance
        Simulation sim;
        std::map<int, Cell> pending;

        Session(std::string id_, RunConfig config) : id(std::move(id_)), sim(std::move(config)) {}
    };

    std::shared_ptr<Session> find(const std::string& id);
    nlohmann::ordered_json render_model(const Session& s, bool advancing) const;
    std::vector<int> waiting_for(const Session& s) const;

    std::optional<std::filesystem::path> history_dir_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// Registers the /v1 routes on `server`.
void register_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace qmap
