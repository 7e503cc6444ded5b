// rng.hpp — reproducible seeding scheme for realization/bundle sub-streams
#pragma once

#include <cstdint>
#include <random>

namespace sbd::rng {

// splitmix64 finalizer; used only to derive well-mixed sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based sub-stream derivation: sub_seed(s, i) is the seed of the
// i-th child stream of s. Streams are indexed hierarchically,
//   realization seed = sub_seed(master_seed, realization_index)
//   bundle stream    = sub_seed(realization_seed, bundle_index)
// so any single realization (or bundle) can be regenerated in isolation.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// Engine type used everywhere; mt19937_64 output is fully specified by the
// standard, so draws are reproducible across platforms.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
// (Avoids std::uniform_real_distribution, whose mapping is
// implementation-defined.)
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace sbd::rng
