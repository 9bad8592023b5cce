#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded randomness used throughout. Everything is built on mt19937_64,
// whose output stream is fixed by the standard, plus explicit transforms.
// Standard-library distributions are avoided on purpose: their algorithms
// are implementation-defined, which would break golden outputs.

namespace mavar {

// Uniform in [0, 1), 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe as a log() argument.
inline double uniform01_open_low(std::mt19937_64& gen) {
    return 1.0 - uniform01(gen);
}

// Rayleigh-distributed amplitude with E[R^2] = mean_square.
inline double rayleigh_from_mean_square(std::mt19937_64& gen, double mean_square) {
    return std::sqrt(-mean_square * std::log(uniform01_open_low(gen)));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-cell seed derivation: a splitmix64 chain over the master seed and the
// cell coordinates, so any cell can be re-run in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s + a);
    s = splitmix64(s + b);
    s = splitmix64(s + c);
    return s;
}

} // namespace mavar
