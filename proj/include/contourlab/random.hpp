#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace contourlab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent sub-streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable 64-bit FNV-1a; std::hash is not portable across standard libraries.
constexpr std::uint64_t hash_string(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
    return mix64(mix64(seed) ^ mix64(key + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
    return derive_seed(seed, hash_string(key));
}

inline Rng substream(std::uint64_t seed, std::uint64_t key) { return Rng(derive_seed(seed, key)); }
inline Rng substream(std::uint64_t seed, std::string_view key) { return Rng(derive_seed(seed, key)); }

/// Poisson draw conditioned on being at least `minimum`, by redrawing.
inline int poisson_at_least(Rng& rng, double lambda, int minimum) {
    std::poisson_distribution<int> dist(lambda);
    for (;;) {
        const int value = dist(rng);
        if (value >= minimum) return value;
    }
}

}  // namespace contourlab
