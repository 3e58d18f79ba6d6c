#pragma once

#include <cstdint>
#include <random>

namespace scldpc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream derivation: every (grid point, trial) pair owns an
/// independent, reproducible engine regardless of worker scheduling.
inline std::mt19937_64 trial_engine(std::uint64_t base_seed, std::uint64_t grid_index,
                                    std::uint64_t trial_index) {
    std::uint64_t s = splitmix64(base_seed);
    s = splitmix64(s ^ (0x587c5f3b0000ULL + grid_index));
    s = splitmix64(s ^ (0x91e10da5c79eULL + trial_index));
    return std::mt19937_64(s);
}

}  // namespace scldpc
