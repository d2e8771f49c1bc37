#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace axy {

// All randomness in the library flows from one master seed through named
// sub-streams (bath, noise, ...), so runs are reproducible and independent
// consumers never share a generator.  splitmix64 is the usual seed scrambler;
// the stream name enters through FNV-1a.

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ fnv1a(stream)) ^ index);
}

// mt19937_64 output mapped to [0,1); the standard distributions are not
// pinned down by the standard, so the mapping and the Gaussian below are
// spelled out here and byte-stable everywhere.
inline double uniform01(std::mt19937_64& gen) {
    return (gen() >> 11) * 0x1.0p-53;
}

// Box-Muller, no state between calls (one sample per pair keeps the draw
// count per site/pulse predictable at the cost of a discarded twin).
inline double normal01(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace axy
