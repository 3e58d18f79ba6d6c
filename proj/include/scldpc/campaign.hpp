#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scldpc/ensemble.hpp"
#include "scldpc/graph.hpp"
#include "scldpc/peeling.hpp"

namespace scldpc {

struct WilsonCI {
    double low = 0.0;
    double high = 0.0;
};

/// 95% Wilson score interval for a binomial proportion.
WilsonCI wilson_ci(long long failures, long long trials);

struct BlerRow {
    double param = 0.0;  // eps or Eb/N0 depending on the campaign
    long long trials = 0;
    long long failures = 0;
    double bler = 0.0;
    WilsonCI ci;
    std::vector<long long> chain_failures;
};

struct BlerTable {
    std::string param_name = "eps";
    int chain_count = 1;
    bool complete = true;
    std::vector<BlerRow> rows;
};

struct TrialOptions {
    bool avoid_4cycles = false;
    bool resample_graph = true;  // fresh code per trial (ensemble average)
    int threads = 0;             // 0: hardware concurrency
    bool record_traces = false;
};

/// Peeling Monte Carlo over an erasure grid with per-chain failure
/// attribution. Deterministic for a fixed base seed, independent of the
/// worker count.
BlerTable run_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                     long long trials, std::uint64_t base_seed, const TrialOptions& opts = {});

/// Per-trial normalized degree-one traces for one eps (used for
/// concentration studies): returns, per trial, the sequence of
/// (tau, r1/(eps*M)) pairs.
std::vector<std::vector<std::pair<double, double>>> trial_r1_traces(
    const ConnectivityMatrix& T, int M, double eps, long long trials, std::uint64_t base_seed,
    const TrialOptions& opts = {});

/// Static partition of [0, n) across a small worker pool; fn(begin, end, worker).
void parallel_chunks(long long n, int threads, const std::function<void(long long, long long, int)>& fn);

}  // namespace scldpc
