#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmap/policy.hpp"

namespace qmap {

/// Integer grid cell; ordering is row-major (y first, then x).
struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

inline constexpr int kUnclaimed = -1;

class MapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct MapConfig {
    int size = 256;       // L
    double radius = 5.0;  // r

    /// Own-influence ceiling for aggressive placement: the influence of a
    /// single city at distance r/2, i.e. 1 + min(1, 2/r).
    double aggressive_threshold() const;
    /// Area of a disc of radius r; the city cap divisor.
    double disc_area() const;
    void validate() const;

    friend bool operator==(const MapConfig&, const MapConfig&) = default;
};

/// Influence of one city at Euclidean distance d.
double kernel(double d, double r);

struct City {
    int owner = 0;
    Cell pos;
    bool is_capital = false;
    int placed_round = 0;

    friend bool operator==(const City&, const City&) = default;
};

struct Borders {
    std::map<int, std::vector<Cell>> with_neighbour;  // row-major cell lists
    std::vector<Cell> frontier;
};

struct Transfer {
    Cell pos;
    int old_owner = 0;
    int new_owner = 0;

    friend bool operator==(const Transfer&, const Transfer&) = default;
};

struct Placement {
    int nation = 0;
    Cell pos;
    std::vector<Cell> razed;
};

enum class PlacementRejection { None, NotHuman, OutOfBounds, Ruin, Occupied, Eliminated };
std::string to_string(PlacementRejection r);

/// L x L world: cities, ruins, per-nation influence and ownership. The
/// influence cache is kept consistent with the city list by every mutator.
class WorldMap {
  public:
    WorldMap(MapConfig config, int nations);

    const MapConfig& config() const { return config_; }
    int size() const { return config_.size; }
    int nations() const { return nations_; }

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < size() && c.y < size(); }
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(size()) + static_cast<std::size_t>(c.x);
    }
    Cell cell_at(std::size_t idx) const {
        return {static_cast<int>(idx % static_cast<std::size_t>(size())),
                static_cast<int>(idx / static_cast<std::size_t>(size()))};
    }

    int owner(Cell c) const { return ownership_[index(c)]; }
    double influence(int nation, Cell c) const {
        return influence_[index(c) * static_cast<std::size_t>(nations_) + static_cast<std::size_t>(nation)];
    }
    std::span<const int> ownership() const { return ownership_; }
    std::span<const double> influence_cache() const { return influence_; }

    const std::vector<City>& cities() const { return cities_; }
    bool is_ruin(Cell c) const { return ruin_[index(c)] != 0; }
    std::vector<Cell> ruins() const;
    std::optional<std::size_t> city_at(Cell c) const;

    int city_count(int nation) const;
    long area(int nation) const;
    /// max(1, floor(A / (pi r^2)))
    int city_cap(int nation) const;
    bool eliminated(int nation) const { return city_count(nation) == 0; }

    /// Adds a city and updates influence around it.
    void add_city(const City& city);
    /// Removes a city; its cell becomes a permanent ruin.
    void raze_city(std::size_t city_index);
    /// Hands a city to a new owner and reassigns capitals as needed.
    void set_city_owner(std::size_t city_index, int new_owner);

    /// Rebuilds the whole influence cache and ownership grid.
    void recompute_full();
    /// Rebuilds only cells within 2r of the given cells.
    void recompute_around(std::span<const Cell> changed);

  private:
    void recompute_cell(std::size_t idx, std::span<const std::size_t> nearby);
    void update_owner(std::size_t idx);
    int reach() const { return reach_; }

    MapConfig config_;
    int nations_;
    int reach_;                          // floor(2r)
    std::vector<double> kernel_table_;   // (2*reach+1)^2 offsets
    std::vector<City> cities_;
    std::vector<char> ruin_;
    std::vector<int> occupied_;          // city index + 1, 0 if none
    std::vector<double> influence_;      // cell-major, nations_ per cell
    std::vector<int> ownership_;
};

/// Border cells of nation j, per neighbour and against unclaimed land.
Borders borders(const WorldMap& map, int j);
/// Borders of every nation in one scan.
std::vector<Borders> all_borders(const WorldMap& map);
/// Same scan over a bare row-major ownership grid of side `size`.
std::vector<Borders> borders_of_grid(std::span<const int> ownership, int size, int nations);

/// Candidate cells for a tactic, row-major, excluding ruins and cities.
std::vector<Cell> placement_candidates(const WorldMap& map, int j, const Tactic& tactic, const Borders& b);
/// Candidate minimizing the tactic's objective, ties by row-major order.
std::optional<Cell> choose_cell(const WorldMap& map, int j, const Tactic& tactic, const Borders& b);

/// Non-capital city of nation j at the cell of maximal own influence.
std::optional<std::size_t> razing_choice(const WorldMap& map, int j);

/// True when adding one more city needs a razing that cannot happen.
bool capped_out(const WorldMap& map, int j);

/// Razes j's strongest non-capital cities until its count fits the cap.
/// Returns the razed cells in order.
std::vector<Cell> enforce_cap(WorldMap& map, int j);

/// Places a city for j following `tactic`; razes first when at the cap.
std::optional<Placement> place_city(WorldMap& map, int j, const Tactic& tactic, int round);

/// Validates a directly chosen cell (human placement).
PlacementRejection check_cell(const WorldMap& map, int j, Cell c);
/// Places a city at a chosen cell subject to cap/razing rules.
std::optional<Placement> place_city_at(WorldMap& map, int j, Cell c, int round);

/// Living cities whose cell is now owned by another nation, row-major.
std::vector<Transfer> detect_transfers(const WorldMap& map);
/// Applies transfers until no city sits on foreign-owned land.
std::vector<Transfer> resolve_transfers(WorldMap& map);

NationStats stats(const WorldMap& before, const WorldMap& after, int j);

}  // namespace qmap
