// Counter-based random numbers (SplitMix64 finalizer). Every draw is a pure
// function of (seed, stream, counter), so results are identical across
// platforms and samples can be generated in any order or in parallel.
#pragma once

#include <cstdint>

namespace voxmesh {

inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent sub-seed for stream `stream` of `seed` (per-stage, per-step,
// per-matrix streams are all derived through this one function).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return mix64(seed ^ mix64(stream + 1));
}

// k-th raw draw of a seed's counter sequence.
inline uint64_t rng_bits(uint64_t seed, uint64_t counter) {
    return mix64(seed + 0x9E3779B97F4A7C15ull * (counter + 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_uniform(uint64_t seed, uint64_t counter) {
    return static_cast<double>(rng_bits(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace voxmesh
