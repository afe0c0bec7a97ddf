#pragma once

// Deterministic randomness helpers. std::shuffle and the std distributions are
// implementation-defined, so everything that must reproduce byte-identically
// across machines (splits, few-shot sampling, the hash embedder) goes through
// the explicit algorithms below. mt19937_64 itself is fully specified.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace vericlaim {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform double in [-1, 1) from 53 random bits.
inline double unit_interval_signed(uint64_t bits) {
    return static_cast<double>(bits >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

// Unbiased draw in [0, bound) via rejection sampling.
inline uint64_t bounded_rand(std::mt19937_64& gen, uint64_t bound) {
    uint64_t threshold = (0ull - bound) % bound;
    for (;;) {
        uint64_t r = gen();
        if (r >= threshold) return r % bound;
    }
}

// Fisher-Yates with explicit draws; stable across standard libraries.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& gen) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded_rand(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, uint64_t seed) {
    std::mt19937_64 gen(seed);
    seeded_shuffle(items, gen);
}

} // namespace vericlaim
