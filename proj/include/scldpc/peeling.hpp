#pragma once

#include <random>
#include <vector>

#include "scldpc/graph.hpp"

namespace scldpc {

struct PDOutcome {
    bool success = false;
    long iterations = 0;
    std::vector<int> r1_trace;              // degree-one checks after each iteration, starting at l = 0
    std::vector<int> residual_positions;    // per-position undecoded variables at stall (empty on success)
    std::vector<std::uint8_t> chain_failed; // chains holding >= 1 undecoded variable
};

/// Workspace reused across trials of one thread.
struct PeelScratch {
    std::vector<int> check_deg;
    std::vector<std::uint8_t> var_alive;
    std::vector<int> deg1;       // dynamic set of degree-one checks
    std::vector<int> deg1_slot;  // check -> index in deg1, or -1
};

/// Peeling decoding of the residual graph: repeatedly pick a degree-one
/// check uniformly at random, remove it together with its variable and all
/// of that variable's edges.
PDOutcome peel(const TannerGraph& g, const std::vector<std::uint8_t>& erased, std::mt19937_64& rng,
               PeelScratch* scratch = nullptr, bool record_trace = false);

}  // namespace scldpc
