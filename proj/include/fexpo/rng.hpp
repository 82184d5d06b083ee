#pragma once

// Per-path random streams keyed by (seed, path index).

#include <cstdint>
#include <random>

namespace fexpo {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL)));
}

} // namespace fexpo
