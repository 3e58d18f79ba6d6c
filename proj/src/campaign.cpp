#include "scldpc/campaign.hpp"

#include <cmath>
#include <thread>

#include "scldpc/rng.hpp"

namespace scldpc {

WilsonCI wilson_ci(long long failures, long long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void parallel_chunks(long long n, int threads, const std::function<void(long long, long long, int)>& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 1 || n <= 1) {
        fn(0, n, 0);
        return;
    }
    workers = static_cast<int>(std::min<long long>(workers, n));
    std::vector<std::thread> pool;
    const long long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long long lo = w * chunk;
        const long long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=, &fn] { fn(lo, hi, w); });
    }
    for (auto& th : pool) th.join();
}

BlerTable run_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                     long long trials, std::uint64_t base_seed, const TrialOptions& opts) {
    if (trials < 1) throw parameter_error("trials must be >= 1");
    if (eps_grid.empty()) throw parameter_error("empty erasure grid");

    BlerTable table;
    table.param_name = "eps";
    table.chain_count = T.chain_count();

    // One shared code instance per grid point when not resampling.
    for (std::size_t gi = 0; gi < eps_grid.size(); ++gi) {
        const double eps = eps_grid[gi];
        TannerGraph shared;
        if (!opts.resample_graph) {
            std::mt19937_64 rng = trial_engine(base_seed, gi, 0x5ca1ab1eULL);
            shared = sample_graph(T, M, rng, opts.avoid_4cycles);
        }

        const int workers =
            opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
        std::vector<long long> fails(std::max(1, workers), 0);
        std::vector<std::vector<long long>> chain_fails(std::max(1, workers),
                                                        std::vector<long long>(table.chain_count, 0));

        parallel_chunks(trials, workers, [&](long long lo, long long hi, int w) {
            PeelScratch scratch;
            for (long long t = lo; t < hi; ++t) {
                std::mt19937_64 rng = trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                const TannerGraph* g = &shared;
                TannerGraph own;
                if (opts.resample_graph) {
                    own = sample_graph(T, M, rng, opts.avoid_4cycles);
                    g = &own;
                }
                const auto erased = apply_bec(*g, eps, rng);
                const PDOutcome out = peel(*g, erased, rng, &scratch, false);
                if (!out.success) {
                    fails[w]++;
                    for (int c = 0; c < table.chain_count; ++c)
                        if (out.chain_failed[c]) chain_fails[w][c]++;
                }
            }
        });

        BlerRow row;
        row.param = eps;
        row.trials = trials;
        row.chain_failures.assign(table.chain_count, 0);
        for (std::size_t w = 0; w < fails.size(); ++w) {
            row.failures += fails[w];
            for (int c = 0; c < table.chain_count; ++c) row.chain_failures[c] += chain_fails[w][c];
        }
        row.bler = static_cast<double>(row.failures) / static_cast<double>(trials);
        row.ci = wilson_ci(row.failures, trials);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::vector<std::pair<double, double>>> trial_r1_traces(
    const ConnectivityMatrix& T, int M, double eps, long long trials, std::uint64_t base_seed,
    const TrialOptions& opts) {
    std::vector<std::vector<std::pair<double, double>>> traces(trials);
    const int workers =
        opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    parallel_chunks(trials, workers, [&](long long lo, long long hi, int) {
        PeelScratch scratch;
        for (long long t = lo; t < hi; ++t) {
            std::mt19937_64 rng = trial_engine(base_seed, 0, static_cast<std::uint64_t>(t));
            TannerGraph g = sample_graph(T, M, rng, opts.avoid_4cycles);
            const auto erased = apply_bec(g, eps, rng);
            const PDOutcome out = peel(g, erased, rng, &scratch, true);
            const double scale = 1.0 / (eps * M);
            auto& tr = traces[t];
            tr.reserve(out.r1_trace.size());
            for (std::size_t l = 0; l < out.r1_trace.size(); ++l)
                tr.emplace_back(l * scale, out.r1_trace[l] * scale);
        }
    });
    return traces;
}

}  // namespace scldpc
