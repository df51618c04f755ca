#include "qmap/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmap {

namespace {

Rgb hsv_to_rgb(double h, double s, double v) {
    double c = v * s;
    double hp = h / 60.0;
    double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c, g = x; break;
        case 1: r = x, g = c; break;
        case 2: g = c, b = x; break;
        case 3: g = x, b = c; break;
        case 4: r = x, b = c; break;
        default: r = c, b = x; break;
    }
    double m = v - c;
    auto to8 = [&](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
    return {to8(r), to8(g), to8(b)};
}

std::array<Rgb, kPaletteSize> build_palette() {
    std::array<Rgb, kPaletteSize> out{};
    constexpr double kValues[3] = {0.95, 0.75, 0.85};
    constexpr double kSats[3] = {0.75, 0.9, 0.5};
    for (int i = 0; i < kPaletteSize; ++i) {
        double hue = std::fmod(i * 137.50776405003785, 360.0);
        out[static_cast<std::size_t>(i)] = hsv_to_rgb(hue, kSats[i % 3], kValues[i % 3]);
    }
    return out;
}

}  // namespace

const std::array<Rgb, kPaletteSize>& nation_palette() {
    static const auto palette = build_palette();
    return palette;
}

std::string render_ppm(const WorldMap& map, int scale) {
    if (scale < 1) scale = 1;
    const int L = map.size();
    const int W = L * scale;
    std::string out = "P6\n" + std::to_string(W) + " " + std::to_string(W) + "\n255\n";
    std::vector<Rgb> cell_color(static_cast<std::size_t>(L) * static_cast<std::size_t>(L), Rgb{0, 0, 0});
    const auto& palette = nation_palette();
    const auto own = map.ownership();
    for (std::size_t i = 0; i < cell_color.size(); ++i) {
        if (own[i] != kUnclaimed) cell_color[i] = palette[static_cast<std::size_t>(own[i] % kPaletteSize)];
    }
    for (Cell c : map.ruins()) cell_color[map.index(c)] = {255, 255, 255};
    for (const City& city : map.cities()) {
        Rgb base = palette[static_cast<std::size_t>(city.owner % kPaletteSize)];
        for (auto& ch : base) ch = static_cast<std::uint8_t>(ch / 4);
        cell_color[map.index(city.pos)] = base;
    }
    out.reserve(out.size() + static_cast<std::size_t>(W) * static_cast<std::size_t>(W) * 3);
    for (int y = 0; y < W; ++y) {
        for (int x = 0; x < W; ++x) {
            const Rgb& c = cell_color[static_cast<std::size_t>((y / scale) * L + (x / scale))];
            out.append(reinterpret_cast<const char*>(c.data()), 3);
        }
    }
    return out;
}

std::string encode_snapshot(const WorldMap& map, int round) {
    std::ostringstream header;
    header << "QMAPSNAP 1 " << map.size() << ' ' << map.config().radius << ' ' << round << '\n';
    std::string out = header.str();
    for (int o : map.ownership()) {
        auto v = static_cast<std::uint16_t>(static_cast<std::int16_t>(o));
        out.push_back(static_cast<char>(v & 0xff));
        out.push_back(static_cast<char>(v >> 8));
    }
    return out;
}

OwnershipSnapshot decode_snapshot(const std::string& bytes) {
    auto nl = bytes.find('\n');
    if (nl == std::string::npos) {
        throw MapError("snapshot has no header");
    }
    std::istringstream header(bytes.substr(0, nl));
    std::string magic;
    int version = 0;
    OwnershipSnapshot snap;
    header >> magic >> version >> snap.size >> snap.radius >> snap.round;
    if (magic != "QMAPSNAP" || version != 1 || !header) {
        throw MapError("not a version-1 map snapshot");
    }
    const std::size_t cells = static_cast<std::size_t>(snap.size) * static_cast<std::size_t>(snap.size);
    if (bytes.size() != nl + 1 + 2 * cells) {
        throw MapError("snapshot body has the wrong length");
    }
    snap.owners.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        auto lo = static_cast<std::uint8_t>(bytes[nl + 1 + 2 * i]);
        auto hi = static_cast<std::uint8_t>(bytes[nl + 2 + 2 * i]);
        snap.owners[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
    }
    return snap;
}

std::vector<std::pair<int, int>> rle_encode(const std::vector<int>& grid) {
    std::vector<std::pair<int, int>> runs;
    for (int v : grid) {
        if (!runs.empty() && runs.back().first == v) {
            ++runs.back().second;
        } else {
            runs.emplace_back(v, 1);
        }
    }
    return runs;
}

std::vector<int> rle_decode(const std::vector<std::pair<int, int>>& runs) {
    std::vector<int> out;
    for (auto [v, count] : runs) {
        if (count < 1) {
            throw MapError("run-length entry with non-positive count");
        }
        out.insert(out.end(), static_cast<std::size_t>(count), v);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace qmap
