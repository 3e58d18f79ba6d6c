#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scldpc/campaign.hpp"
#include "scldpc/graph.hpp"

namespace scldpc {

struct BPConfig {
    int max_iterations = 200;
    double llr_clip = 25.0;
    bool early_stop = true;
};

struct BecBPOutcome {
    bool success = false;
    int iterations = 0;
    long long residual_erasures = 0;
    std::vector<std::uint8_t> recovered;  // per variable, includes non-erased
};

struct AwgnBPOutcome {
    bool syndrome_ok = false;
    int iterations = 0;
    std::vector<std::uint8_t> hard;  // per-variable decisions
    std::vector<double> app;         // per-variable a posteriori LLRs
};

/// Erasure message passing to the fixpoint (or the iteration cap). On the
/// BEC this computes the same residual as peeling decoding.
BecBPOutcome bp_decode_bec(const TannerGraph& g, const std::vector<std::uint8_t>& erased,
                           const BPConfig& cfg);

/// Flooding sum-product with the tanh check rule and LLR clipping.
AwgnBPOutcome bp_decode_biawgn(const TannerGraph& g, const std::vector<double>& channel_llrs,
                               const BPConfig& cfg);

/// All-zero-codeword BPSK Monte Carlo over an Eb/N0 (dB) grid. The design
/// rate maps Eb/N0 to the noise variance 1 / (2 * rate * 10^(EbN0/10)).
BlerTable simulate_biawgn(const ConnectivityMatrix& T, int M, const std::vector<double>& ebn0_grid,
                          long long trials, std::uint64_t base_seed, const BPConfig& cfg,
                          const TrialOptions& opts = {});

/// BEC Monte Carlo decoded by message passing instead of peeling. Same seed
/// derivation as run_trials, so outcomes pair one-to-one with PD campaigns.
BlerTable bec_bp_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                        long long trials, std::uint64_t base_seed, const BPConfig& cfg,
                        const TrialOptions& opts = {});

}  // namespace scldpc
