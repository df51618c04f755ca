#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "qmap/qsim.hpp"

namespace qmap {

CouplingMap::CouplingMap(int n, std::vector<QubitPair> edges) : n_(n) {
    if (n < 1) {
        throw QsimError("coupling map needs at least one node");
    }
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) {
            throw QsimError("coupling edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        }
        if (a == b) {
            throw QsimError("coupling edge is a self-loop on " + std::to_string(a));
        }
        edges_.push_back(make_pair_sorted(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    if (!is_connected()) {
        spdlog::warn("coupling map with {} nodes is not connected", n_);
    }
}

CouplingMap CouplingMap::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw QsimError(std::string("coupling map is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
        throw QsimError("coupling map needs fields \"n\" and \"edges\"");
    }
    std::vector<QubitPair> edges;
    for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw QsimError("coupling edge must be a two-element array");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return CouplingMap(doc.at("n").get<int>(), std::move(edges));
}

CouplingMap CouplingMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw QsimError("cannot read coupling map file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string CouplingMap::to_json_text() const {
    nlohmann::ordered_json doc;
    doc["n"] = n_;
    doc["edges"] = nlohmann::ordered_json::array();
    for (auto [a, b] : edges_) {
        doc["edges"].push_back({a, b});
    }
    return doc.dump();
}

CouplingMap CouplingMap::path(int n) {
    std::vector<QubitPair> edges;
    for (int q = 0; q + 1 < n; ++q) {
        edges.emplace_back(q, q + 1);
    }
    return CouplingMap(n, std::move(edges));
}

CouplingMap CouplingMap::ring(int n) {
    std::vector<QubitPair> edges;
    for (int q = 0; q < n; ++q) {
        if (n > 2 || q + 1 < n) {
            edges.emplace_back(q, (q + 1) % n);
        }
    }
    return CouplingMap(n, std::move(edges));
}

bool CouplingMap::has_edge(int a, int b) const {
    return std::binary_search(edges_.begin(), edges_.end(), make_pair_sorted(a, b));
}

std::vector<int> CouplingMap::neighbours(int q) const {
    std::vector<int> out;
    for (auto [a, b] : edges_) {
        if (a == q) out.push_back(b);
        if (b == q) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool CouplingMap::is_connected() const {
    if (n_ <= 1) {
        return true;
    }
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = 1;
    int count = 1;
    while (!todo.empty()) {
        int q = todo.front();
        todo.pop();
        for (int nb : neighbours(q)) {
            if (!seen[nb]) {
                seen[nb] = 1;
                ++count;
                todo.push(nb);
            }
        }
    }
    return count == n_;
}

std::vector<int> CouplingMap::bicoloring() const {
    std::vector<int> color(static_cast<std::size_t>(n_), -1);
    for (int start = 0; start < n_; ++start) {
        if (color[start] != -1) {
            continue;
        }
        color[start] = 0;
        std::queue<int> todo;
        todo.push(start);
        while (!todo.empty()) {
            int q = todo.front();
            todo.pop();
            for (int nb : neighbours(q)) {
                if (color[nb] == -1) {
                    color[nb] = 1 - color[q];
                    todo.push(nb);
                } else if (color[nb] == color[q]) {
                    return {};
                }
            }
        }
    }
    return color;
}

}  // namespace qmap
