#pragma once

#include <cstdint>
#include <vector>

#include "scldpc/bp.hpp"
#include "scldpc/ensemble.hpp"
#include "scldpc/graph.hpp"

namespace scldpc {

struct stream_order_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One transmitted sub-block: M encoded bits of one chain position.
/// Both fields are 1-based (chain index within the stack, position within
/// the chain's D = L+2 slots).
struct SubBlock {
    int chain = 1;
    int position = 0;
    bool operator==(const SubBlock& o) const { return chain == o.chain && position == o.position; }
};

struct TransmissionSchedule {
    std::vector<SubBlock> order;
};

/// Sub-block transmission order for connected-chain streaming: each chain is
/// sent in natural order, except that the boundary blocks (positions 2 and
/// L+1) of every child chain are advanced to just after the parent block
/// that closes the strengthened region they protect.
TransmissionSchedule transmission_schedule(const ConnectivityMatrix& T);

/// Chains in block order, occupied positions ascending. The degenerate
/// schedule used for unconnected families.
TransmissionSchedule natural_schedule(const ConnectivityMatrix& T);

struct WindowBecOutcome {
    bool success = false;
    long long residual_erasures = 0;
    std::vector<std::uint8_t> recovered;
    int windows = 0;
};

struct WindowAwgnOutcome {
    bool all_zero = false;
    std::vector<std::uint8_t> hard;
    int windows = 0;
};

/// Sliding-window decoding over the schedule: BP restricted to W consecutive
/// positions (in decode order), using committed decisions to the left and
/// channel values for arrived positions outside the window. Shifts when the
/// leftmost position resolves or the iteration budget runs out.
WindowBecOutcome window_decode_bec(const TannerGraph& g, const ConnectivityMatrix& T,
                                   const std::vector<std::uint8_t>& erased,
                                   const TransmissionSchedule& schedule, int W, const BPConfig& cfg);

WindowAwgnOutcome window_decode_biawgn(const TannerGraph& g, const ConnectivityMatrix& T,
                                       const std::vector<double>& channel_llrs,
                                       const TransmissionSchedule& schedule, int W, const BPConfig& cfg);

struct WindowCompareRow {
    double param = 0.0;
    long long trials = 0;
    long long failures_full = 0;
    long long failures_window = 0;
    double bler_full = 0.0;
    double bler_window = 0.0;
    WilsonCI ci_full;
    WilsonCI ci_window;
    long long outcome_mismatches = 0;  // paired seeds where full and window disagree
};

/// Paired-seed full-vs-window BEC campaign: every trial decodes the same
/// (graph, erasure) instance both ways.
std::vector<WindowCompareRow> window_compare_bec(const ConnectivityMatrix& T, int M,
                                                 const std::vector<double>& eps_grid, long long trials,
                                                 std::uint64_t base_seed, int W, const BPConfig& cfg,
                                                 const TrialOptions& opts = {});

/// Window-only campaigns, one per channel.
BlerTable bec_window_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                            long long trials, std::uint64_t base_seed, int W, const BPConfig& cfg,
                            const TrialOptions& opts = {});
BlerTable awgn_window_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& ebn0_grid,
                             long long trials, std::uint64_t base_seed, int W, const BPConfig& cfg,
                             const TrialOptions& opts = {});

}  // namespace scldpc
