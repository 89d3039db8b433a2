#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace marketdiag {

// splitmix64 finalizer; good avalanche, cheap enough to call per draw.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ b);
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(hash2(a, b) ^ c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix64(hash3(a, b, c) ^ d);
}

// Uniform in (0,1]; never returns 0 so it is safe under log().
inline double uniform01(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// Counter-based standard normal draw: fully determined by (seed, stream, t),
// so generation order and parallel scheduling never change the output.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t t) {
    const double u1 = uniform01(hash4(seed, stream, t, 0));
    const double u2 = uniform01(hash4(seed, stream, t, 1));
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Unbiased bounded integer in [0, n) via rejection sampling.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Partial Fisher-Yates: deterministically pick k distinct elements of items.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
}

}  // namespace marketdiag
