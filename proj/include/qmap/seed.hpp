#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace qmap {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a subsystem: FNV-1a of the component label folded with the
/// master seed and each index through splitmix64.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                           std::initializer_list<std::uint64_t> indices = {}) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = splitmix64(master ^ h);
    for (std::uint64_t i : indices) {
        s = splitmix64(s ^ i);
    }
    return s;
}

}  // namespace qmap
