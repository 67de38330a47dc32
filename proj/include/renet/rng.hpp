#pragma once

#include <cstdint>
#include <random>

namespace renet {

using Rng = std::mt19937_64;

// splitmix64 finalizer (Steele/Lea/Flood constants).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b * 0xff51afd7ed558ccdULL));
}

inline constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b), c);
}

// Counter-based derivation: the stream for trial `index` depends only on
// (master, stream_tag, index), so trials can run on any worker in any order.
inline Rng make_trial_rng(std::uint64_t master, std::uint64_t stream_tag, std::uint64_t index) {
    return Rng(mix64(master, stream_tag, index));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

// Uniform in [0, 1) with 53 random bits.
inline double u01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace renet
