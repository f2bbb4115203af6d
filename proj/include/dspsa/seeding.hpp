#pragma once

#include <cstdint>
#include <random>

namespace dspsa {

// SplitMix64 finalizer (Steele, Lea, Flood 2014):
//   z = (x + 0x9E3779B97F4A7C15)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z ^ (z >> 31)
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Maps (base_seed, counter) to a derived stream seed. Every seed used by the
/// optimizer, the simulator and the campaign harness goes through this.
constexpr std::uint64_t mix(std::uint64_t base_seed, std::uint64_t counter) noexcept {
    return splitmix64(base_seed ^ splitmix64(counter));
}

// Salts for streams that must never collide with oracle seeds.
inline constexpr std::uint64_t kPerturbationSalt = 0x5045525455524221ULL;
inline constexpr std::uint64_t kTrialSalt = 0x545249414C534545ULL;

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

} // namespace dspsa
