#pragma once

#include <cstdint>
#include <random>

namespace mimic {

// Independent random streams derived from one run seed, so that changing
// how much one consumer draws never shifts another consumer's sequence.
enum class Stream : std::uint64_t {
    pool = 1,
    benign = 2,
    attacker = 3,
    clustering = 4,
    scheduler = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)));
}

}  // namespace mimic
