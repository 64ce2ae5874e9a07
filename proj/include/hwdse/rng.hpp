#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hwdse {

/// SplitMix64 finalizer; used to derive independent, reproducible streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Deterministic N(0,1) value keyed by (seed, key), via Box-Muller.
inline double standard_normal_hash(std::uint64_t seed, std::uint64_t key) {
    const std::uint64_t a = derive_seed(seed, 2 * key);
    const std::uint64_t b = derive_seed(seed, 2 * key + 1);
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hwdse
