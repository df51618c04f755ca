#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qmap/mapgen.hpp"

namespace qmap {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr int kPaletteSize = 53;

/// Fixed nation palette; nation j uses entry j % 53.
const std::array<Rgb, kPaletteSize>& nation_palette();

/// Binary PPM (P6): nation colors, black for unclaimed land, darkened nation
/// color on city cells and white on ruins.
std::string render_ppm(const WorldMap& map, int scale = 1);

/// Compact ownership snapshot: a text header "QMAPSNAP 1 <L> <r> <round>\n"
/// followed by L*L little-endian int16 owners in row-major order (-1 unclaimed).
std::string encode_snapshot(const WorldMap& map, int round);

struct OwnershipSnapshot {
    int size = 0;
    double radius = 0.0;
    int round = 0;
    std::vector<int> owners;
};
OwnershipSnapshot decode_snapshot(const std::string& bytes);

/// Run-length encoding of an ownership grid as [value, count] pairs.
std::vector<std::pair<int, int>> rle_encode(const std::vector<int>& grid);
std::vector<int> rle_decode(const std::vector<std::pair<int, int>>& runs);

void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace qmap
