#include "qmap/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qmap {

std::string to_string(PlacementRejection r) {
    switch (r) {
        case PlacementRejection::None: return "accepted";
        case PlacementRejection::NotHuman: return "not human nation";
        case PlacementRejection::OutOfBounds: return "out of bounds";
        case PlacementRejection::Ruin: return "ruin";
        case PlacementRejection::Occupied: return "occupied";
        case PlacementRejection::Eliminated: return "eliminated";
    }
    return "unknown";
}

double MapConfig::aggressive_threshold() const { return 1.0 + std::min(1.0, 2.0 / radius); }

double MapConfig::disc_area() const { return std::numbers::pi * radius * radius; }

void MapConfig::validate() const {
    if (size < 16) {
        throw MapError("map size must be at least 16");
    }
    if (!(radius >= 1.0)) {
        throw MapError("influence radius must be at least 1");
    }
    if (!(2.0 * radius < static_cast<double>(size))) {
        throw MapError("influence diameter 2r must be smaller than the map size");
    }
}

double kernel(double d, double r) {
    if (d <= r) {
        return d <= 1.0 ? 2.0 : 1.0 + 1.0 / d;
    }
    if (d <= 2.0 * r) {
        return 1.0 / d;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

WorldMap::WorldMap(MapConfig config, int nations) : config_(config), nations_(nations) {
    config_.validate();
    if (nations < 1) {
        throw MapError("world needs at least one nation");
    }
    reach_ = static_cast<int>(std::floor(2.0 * config_.radius));
    const int span = 2 * reach_ + 1;
    kernel_table_.resize(static_cast<std::size_t>(span * span));
    for (int dy = -reach_; dy <= reach_; ++dy) {
        for (int dx = -reach_; dx <= reach_; ++dx) {
            double d = std::sqrt(static_cast<double>(dx * dx + dy * dy));
            kernel_table_[static_cast<std::size_t>((dy + reach_) * span + (dx + reach_))] = kernel(d, config_.radius);
        }
    }
    const std::size_t cells = static_cast<std::size_t>(size()) * static_cast<std::size_t>(size());
    ruin_.assign(cells, 0);
    occupied_.assign(cells, 0);
    influence_.assign(cells * static_cast<std::size_t>(nations_), 0.0);
    ownership_.assign(cells, kUnclaimed);
}

std::vector<Cell> WorldMap::ruins() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < ruin_.size(); ++i) {
        if (ruin_[i]) out.push_back(cell_at(i));
    }
    return out;
}

std::optional<std::size_t> WorldMap::city_at(Cell c) const {
    if (!in_bounds(c)) return std::nullopt;
    int v = occupied_[index(c)];
    if (v == 0) return std::nullopt;
    return static_cast<std::size_t>(v - 1);
}

int WorldMap::city_count(int nation) const {
    return static_cast<int>(std::count_if(cities_.begin(), cities_.end(), [&](const City& c) { return c.owner == nation; }));
}

long WorldMap::area(int nation) const {
    return static_cast<long>(std::count(ownership_.begin(), ownership_.end(), nation));
}

int WorldMap::city_cap(int nation) const {
    double cap = std::floor(static_cast<double>(area(nation)) / config_.disc_area());
    return std::max(1, static_cast<int>(cap));
}

void WorldMap::add_city(const City& city) {
    if (city.owner < 0 || city.owner >= nations_) {
        throw MapError("city owner out of range");
    }
    if (!in_bounds(city.pos)) {
        throw MapError("city position out of bounds");
    }
    if (is_ruin(city.pos)) {
        throw MapError("cannot build on a ruin");
    }
    if (city_at(city.pos)) {
        throw MapError("cell already holds a city");
    }
    cities_.push_back(city);
    occupied_[index(city.pos)] = static_cast<int>(cities_.size());
    const Cell changed[1] = {city.pos};
    recompute_around(changed);
}

void WorldMap::raze_city(std::size_t city_index) {
    if (city_index >= cities_.size()) {
        throw MapError("no such city");
    }
    if (cities_[city_index].is_capital) {
        throw MapError("capitals cannot be razed");
    }
    Cell pos = cities_[city_index].pos;
    cities_.erase(cities_.begin() + static_cast<std::ptrdiff_t>(city_index));
    std::fill(occupied_.begin(), occupied_.end(), 0);
    for (std::size_t i = 0; i < cities_.size(); ++i) {
        occupied_[index(cities_[i].pos)] = static_cast<int>(i + 1);
    }
    ruin_[index(pos)] = 1;
    const Cell changed[1] = {pos};
    recompute_around(changed);
}

void WorldMap::set_city_owner(std::size_t city_index, int new_owner) {
    if (city_index >= cities_.size()) {
        throw MapError("no such city");
    }
    if (new_owner < 0 || new_owner >= nations_) {
        throw MapError("new owner out of range");
    }
    City& city = cities_[city_index];
    int old_owner = city.owner;
    bool was_capital = city.is_capital;
    city.owner = new_owner;
    city.is_capital = false;
    if (was_capital) {
        // Oldest remaining city of the old owner becomes its capital.
        std::optional<std::size_t> heir;
        for (std::size_t i = 0; i < cities_.size(); ++i) {
            if (cities_[i].owner != old_owner) continue;
            if (!heir || cities_[i].placed_round < cities_[*heir].placed_round) heir = i;
        }
        if (heir) cities_[*heir].is_capital = true;
    }
    const Cell changed[1] = {city.pos};
    recompute_around(changed);
}

void WorldMap::update_owner(std::size_t idx) {
    const double* inf = &influence_[idx * static_cast<std::size_t>(nations_)];
    int best = kUnclaimed;
    double best_value = 0.0;
    for (int n = 0; n < nations_; ++n) {
        if (inf[n] > best_value) {
            best_value = inf[n];
            best = n;
        }
    }
    ownership_[idx] = best;
}

void WorldMap::recompute_cell(std::size_t idx, std::span<const std::size_t> nearby) {
    double* inf = &influence_[idx * static_cast<std::size_t>(nations_)];
    std::fill(inf, inf + nations_, 0.0);
    const Cell c = cell_at(idx);
    const int span = 2 * reach_ + 1;
    for (std::size_t ci : nearby) {
        const City& city = cities_[ci];
        int dx = c.x - city.pos.x;
        int dy = c.y - city.pos.y;
        if (dx < -reach_ || dx > reach_ || dy < -reach_ || dy > reach_) continue;
        inf[city.owner] += kernel_table_[static_cast<std::size_t>((dy + reach_) * span + (dx + reach_))];
    }
    update_owner(idx);
}

void WorldMap::recompute_around(std::span<const Cell> changed) {
    std::vector<std::size_t> nearby;
    for (Cell c : changed) {
        nearby.clear();
        for (std::size_t i = 0; i < cities_.size(); ++i) {
            const Cell p = cities_[i].pos;
            if (std::abs(p.x - c.x) <= 2 * reach_ && std::abs(p.y - c.y) <= 2 * reach_) {
                nearby.push_back(i);
            }
        }
        const int x0 = std::max(0, c.x - reach_), x1 = std::min(size() - 1, c.x + reach_);
        const int y0 = std::max(0, c.y - reach_), y1 = std::min(size() - 1, c.y + reach_);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                recompute_cell(index({x, y}), nearby);
            }
        }
    }
}

void WorldMap::recompute_full() {
    std::fill(influence_.begin(), influence_.end(), 0.0);
    const int span = 2 * reach_ + 1;
    for (const City& city : cities_) {
        const int x0 = std::max(0, city.pos.x - reach_), x1 = std::min(size() - 1, city.pos.x + reach_);
        const int y0 = std::max(0, city.pos.y - reach_), y1 = std::min(size() - 1, city.pos.y + reach_);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                int dx = x - city.pos.x;
                int dy = y - city.pos.y;
                influence_[index({x, y}) * static_cast<std::size_t>(nations_) + static_cast<std::size_t>(city.owner)] +=
                    kernel_table_[static_cast<std::size_t>((dy + reach_) * span + (dx + reach_))];
            }
        }
    }
    for (std::size_t i = 0; i < ownership_.size(); ++i) {
        update_owner(i);
    }
}

// ---------------------------------------------------------------------------

std::vector<Borders> all_borders(const WorldMap& map) {
    return borders_of_grid(map.ownership(), map.size(), map.nations());
}

std::vector<Borders> borders_of_grid(std::span<const int> own, int L, int nations) {
    if (own.size() != static_cast<std::size_t>(L) * static_cast<std::size_t>(L)) {
        throw MapError("ownership grid does not match its size");
    }
    std::vector<Borders> out(static_cast<std::size_t>(nations));
    constexpr int kDx[4] = {0, -1, 1, 0};
    constexpr int kDy[4] = {-1, 0, 0, 1};
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            const int o = own[static_cast<std::size_t>(y * L + x)];
            if (o == kUnclaimed) continue;
            bool frontier = false;
            int touched[4];
            int n_touched = 0;
            for (int d = 0; d < 4; ++d) {
                int nx = x + kDx[d], ny = y + kDy[d];
                if (nx < 0 || ny < 0 || nx >= L || ny >= L) continue;
                int k = own[static_cast<std::size_t>(ny * L + nx)];
                if (k == kUnclaimed) {
                    frontier = true;
                } else if (k != o && std::find(touched, touched + n_touched, k) == touched + n_touched) {
                    touched[n_touched++] = k;
                }
            }
            if (o < 0 || o >= nations) throw MapError("owner out of range in ownership grid");
            Borders& b = out[static_cast<std::size_t>(o)];
            if (frontier) b.frontier.push_back({x, y});
            std::sort(touched, touched + n_touched);
            for (int t = 0; t < n_touched; ++t) b.with_neighbour[touched[t]].push_back({x, y});
        }
    }
    return out;
}

Borders borders(const WorldMap& map, int j) { return all_borders(map).at(static_cast<std::size_t>(j)); }

std::vector<Cell> placement_candidates(const WorldMap& map, int j, const Tactic& tactic, const Borders& b) {
    const std::vector<Cell>* source = nullptr;
    static const std::vector<Cell> kEmpty;
    if (tactic.kind == Tactic::Kind::Explore) {
        source = &b.frontier;
    } else {
        auto it = b.with_neighbour.find(tactic.target);
        source = it == b.with_neighbour.end() ? &kEmpty : &it->second;
    }
    const double threshold = map.config().aggressive_threshold();
    std::vector<Cell> out;
    for (Cell c : *source) {
        if (map.is_ruin(c) || map.city_at(c)) continue;
        if (tactic.kind == Tactic::Kind::Attack && map.influence(j, c) > threshold) continue;
        out.push_back(c);
    }
    return out;
}

std::optional<Cell> choose_cell(const WorldMap& map, int j, const Tactic& tactic, const Borders& b) {
    std::optional<Cell> best;
    double best_value = 0.0;
    const int measured = tactic.kind == Tactic::Kind::Attack ? tactic.target : j;
    for (Cell c : placement_candidates(map, j, tactic, b)) {
        double v = map.influence(measured, c);
        if (!best || v < best_value) {
            best = c;
            best_value = v;
        }
    }
    return best;
}

std::optional<std::size_t> razing_choice(const WorldMap& map, int j) {
    std::optional<std::size_t> best;
    double best_value = 0.0;
    const auto& cities = map.cities();
    for (std::size_t i = 0; i < cities.size(); ++i) {
        const City& c = cities[i];
        if (c.owner != j || c.is_capital) continue;
        double v = map.influence(j, c.pos);
        if (!best || v > best_value || (v == best_value && c.pos < cities[*best].pos)) {
            best = i;
            best_value = v;
        }
    }
    return best;
}

namespace {

// Razings needed before one more city fits under the cap.
int razings_needed(const WorldMap& map, int j) {
    return std::max(0, map.city_count(j) - map.city_cap(j) + 1);
}

bool can_make_room(const WorldMap& map, int j) {
    int needed = razings_needed(map, j);
    int razable = 0;
    for (const City& c : map.cities()) {
        if (c.owner == j && !c.is_capital) ++razable;
    }
    return needed <= razable;
}

std::optional<Placement> build_at(WorldMap& map, int j, Cell pos, int round) {
    if (!can_make_room(map, j)) {
        return std::nullopt;
    }
    Placement out;
    out.nation = j;
    out.pos = pos;
    while (map.city_count(j) >= map.city_cap(j)) {
        auto victim = razing_choice(map, j);
        if (!victim) {
            // Razing shrank the territory below what the remaining cities allow.
            break;
        }
        out.razed.push_back(map.cities()[*victim].pos);
        map.raze_city(*victim);
    }
    map.add_city({j, pos, false, round});
    return out;
}

}  // namespace

bool capped_out(const WorldMap& map, int j) { return !can_make_room(map, j); }

std::vector<Cell> enforce_cap(WorldMap& map, int j) {
    std::vector<Cell> razed;
    while (map.city_count(j) > map.city_cap(j)) {
        auto victim = razing_choice(map, j);
        if (!victim) break;
        razed.push_back(map.cities()[*victim].pos);
        map.raze_city(*victim);
    }
    return razed;
}

std::optional<Placement> place_city(WorldMap& map, int j, const Tactic& tactic, int round) {
    if (map.eliminated(j)) {
        throw MapError("nation " + std::to_string(j) + " has no cities");
    }
    auto chosen = choose_cell(map, j, tactic, borders(map, j));
    if (!chosen) {
        return std::nullopt;
    }
    return build_at(map, j, *chosen, round);
}

PlacementRejection check_cell(const WorldMap& map, int j, Cell c) {
    if (map.eliminated(j)) return PlacementRejection::Eliminated;
    if (!map.in_bounds(c)) return PlacementRejection::OutOfBounds;
    if (map.is_ruin(c)) return PlacementRejection::Ruin;
    if (map.city_at(c)) return PlacementRejection::Occupied;
    return PlacementRejection::None;
}

std::optional<Placement> place_city_at(WorldMap& map, int j, Cell c, int round) {
    if (check_cell(map, j, c) != PlacementRejection::None) {
        return std::nullopt;
    }
    return build_at(map, j, c, round);
}

std::vector<Transfer> detect_transfers(const WorldMap& map) {
    std::vector<Transfer> out;
    for (const City& c : map.cities()) {
        int o = map.owner(c.pos);
        if (o != kUnclaimed && o != c.owner) {
            out.push_back({c.pos, c.owner, o});
        }
    }
    std::sort(out.begin(), out.end(), [](const Transfer& a, const Transfer& b) { return a.pos < b.pos; });
    return out;
}

std::vector<Transfer> resolve_transfers(WorldMap& map) {
    std::vector<Transfer> out;
    for (int pass = 0;; ++pass) {
        if (pass > 10000) {
            throw MapError("city transfers did not settle");
        }
        auto pending = detect_transfers(map);
        if (pending.empty()) break;
        for (const Transfer& t : pending) {
            auto ci = map.city_at(t.pos);
            int now = map.owner(t.pos);
            if (!ci || now == kUnclaimed || now == map.cities()[*ci].owner) continue;
            Transfer applied{t.pos, map.cities()[*ci].owner, now};
            map.set_city_owner(*ci, now);
            out.push_back(applied);
        }
    }
    return out;
}

NationStats stats(const WorldMap& before, const WorldMap& after, int j) {
    if (!(before.config() == after.config())) {
        throw MapError("stats needs maps with the same configuration");
    }
    NationStats s;
    const auto b = before.ownership();
    const auto a = after.ownership();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == j) {
            ++s.area;
            if (b[i] != j && b[i] != kUnclaimed) ++s.gained;
        } else if (b[i] == j) {
            ++s.lost;
        }
    }
    s.frontier = static_cast<long>(borders(after, j).frontier.size());
    return s;
}

}  // namespace qmap
