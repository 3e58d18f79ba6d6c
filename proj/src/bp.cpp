#include "scldpc/bp.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "scldpc/rng.hpp"

namespace scldpc {

BecBPOutcome bp_decode_bec(const TannerGraph& g, const std::vector<std::uint8_t>& erased,
                           const BPConfig& cfg) {
    BecBPOutcome out;
    out.recovered.assign(g.n_vars, 0);
    for (int v = 0; v < g.n_vars; ++v) out.recovered[v] = erased[v] ? 0 : 1;

    long long unknown = 0;
    for (int v = 0; v < g.n_vars; ++v)
        if (!out.recovered[v]) ++unknown;

    // Flooding rounds over a check frontier: only checks that lost an
    // unknown neighbor since their last visit can newly pin a variable, so
    // each round is equivalent to a full sweep at a fraction of the cost.
    std::vector<int> frontier(g.n_checks);
    for (int c = 0; c < g.n_checks; ++c) frontier[c] = c;
    std::vector<int> pinned, next;
    std::vector<int> in_next(g.n_checks, -1);

    int iter = 0;
    while (unknown > 0 && !frontier.empty() && iter < cfg.max_iterations) {
        ++iter;
        pinned.clear();
        for (int c : frontier) {
            int n_unknown = 0, candidate = -1;
            for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k) {
                const int v = g.check_adj[k];
                if (!out.recovered[v]) {
                    ++n_unknown;
                    candidate = v;
                    if (n_unknown > 1) break;
                }
            }
            if (n_unknown == 1) pinned.push_back(candidate);
        }
        next.clear();
        long long recovered_this_round = 0;
        for (int v : pinned) {
            if (out.recovered[v]) continue;  // pinned by two checks in one round
            out.recovered[v] = 1;
            ++recovered_this_round;
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) {
                const int c = g.var_adj[e];
                if (in_next[c] != iter) {
                    in_next[c] = iter;
                    next.push_back(c);
                }
            }
        }
        unknown -= recovered_this_round;
        frontier.swap(next);
    }

    out.iterations = iter;
    out.residual_erasures = unknown;
    out.success = unknown == 0;
    return out;
}

namespace {

double clip(double x, double lim) { return x < -lim ? -lim : (x > lim ? lim : x); }

}  // namespace

AwgnBPOutcome bp_decode_biawgn(const TannerGraph& g, const std::vector<double>& channel_llrs,
                               const BPConfig& cfg) {
    const int E = g.edge_count();
    std::vector<double> v2c(E), c2v(E, 0.0);
    std::vector<double> tnh;
    AwgnBPOutcome out;
    out.app.assign(g.n_vars, 0.0);
    out.hard.assign(g.n_vars, 0);

    for (int v = 0; v < g.n_vars; ++v)
        for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
            v2c[e] = clip(channel_llrs[v], cfg.llr_clip);

    auto syndrome_ok = [&]() {
        for (int c = 0; c < g.n_checks; ++c) {
            int parity = 0;
            for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k) parity ^= out.hard[g.check_adj[k]];
            if (parity) return false;
        }
        return true;
    };

    int iter = 0;
    while (iter < cfg.max_iterations) {
        ++iter;
        // Check nodes: tanh rule via prefix/suffix products.
        for (int c = 0; c < g.n_checks; ++c) {
            const int lo = g.check_off[c], hi = g.check_off[c + 1];
            const int deg = hi - lo;
            if (deg == 0) continue;
            tnh.resize(deg);
            for (int k = 0; k < deg; ++k) tnh[k] = std::tanh(0.5 * v2c[g.check_edges[lo + k]]);
            double pre = 1.0;
            for (int k = 0; k < deg; ++k) {
                c2v[g.check_edges[lo + k]] = pre;
                pre *= tnh[k];
            }
            double suf = 1.0;
            for (int k = deg - 1; k >= 0; --k) {
                const int e = g.check_edges[lo + k];
                const double p = c2v[e] * suf;
                suf *= tnh[k];
                const double bounded = std::max(-1.0 + 1e-15, std::min(1.0 - 1e-15, p));
                c2v[e] = clip(2.0 * std::atanh(bounded), cfg.llr_clip);
            }
        }
        // Variable nodes.
        for (int v = 0; v < g.n_vars; ++v) {
            double total = channel_llrs[v];
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) total += c2v[e];
            out.app[v] = total;
            out.hard[v] = total < 0.0 ? 1 : 0;
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
                v2c[e] = clip(total - c2v[e], cfg.llr_clip);
        }
        if (cfg.early_stop && syndrome_ok()) {
            out.syndrome_ok = true;
            break;
        }
    }
    if (!out.syndrome_ok) out.syndrome_ok = syndrome_ok();
    out.iterations = iter;
    return out;
}

BlerTable simulate_biawgn(const ConnectivityMatrix& T, int M, const std::vector<double>& ebn0_grid,
                          long long trials, std::uint64_t base_seed, const BPConfig& cfg,
                          const TrialOptions& opts) {
    if (trials < 1) throw parameter_error("trials must be >= 1");
    if (ebn0_grid.empty()) throw parameter_error("empty Eb/N0 grid");
    const double rate = design_rate(T).value();
    if (rate <= 0.0) throw parameter_error("nonpositive design rate");

    BlerTable table;
    table.param_name = "ebn0";
    table.chain_count = T.chain_count();

    for (std::size_t gi = 0; gi < ebn0_grid.size(); ++gi) {
        const double ebn0_db = ebn0_grid[gi];
        const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
        const double sigma = std::sqrt(sigma2);

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
            std::vector<double> llr;
            for (long long t = lo; t < hi; ++t) {
                std::mt19937_64 rng = trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                const TannerGraph* g = &shared;
                TannerGraph own;
                if (opts.resample_graph) {
                    own = sample_graph(T, M, rng, opts.avoid_4cycles);
                    g = &own;
                }
                llr.resize(g->n_vars);
                std::normal_distribution<double> noise(0.0, sigma);
                for (int v = 0; v < g->n_vars; ++v) llr[v] = 2.0 * (1.0 + noise(rng)) / sigma2;
                const AwgnBPOutcome out = bp_decode_biawgn(*g, llr, cfg);

                bool failed = false;
                std::vector<std::uint8_t> chain_bad(table.chain_count, 0);
                for (int v = 0; v < g->n_vars; ++v)
                    if (out.hard[v]) {
                        failed = true;
                        chain_bad[g->var_chain[v]] = 1;
                    }
                if (failed) {
                    fails[w]++;
                    for (int c = 0; c < table.chain_count; ++c)
                        if (chain_bad[c]) chain_fails[w][c]++;
                }
            }
        });

        BlerRow row;
        row.param = ebn0_db;
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

BlerTable bec_bp_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                        long long trials, std::uint64_t base_seed, const BPConfig& cfg,
                        const TrialOptions& opts) {
    if (trials < 1) throw parameter_error("trials must be >= 1");
    if (eps_grid.empty()) throw parameter_error("empty erasure grid");

    BlerTable table;
    table.param_name = "eps";
    table.chain_count = T.chain_count();

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
            for (long long t = lo; t < hi; ++t) {
                std::mt19937_64 rng = trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                const TannerGraph* g = &shared;
                TannerGraph own;
                if (opts.resample_graph) {
                    own = sample_graph(T, M, rng, opts.avoid_4cycles);
                    g = &own;
                }
                const auto erased = apply_bec(*g, eps, rng);
                const BecBPOutcome out = bp_decode_bec(*g, erased, cfg);
                if (!out.success) {
                    fails[w]++;
                    std::vector<std::uint8_t> chain_bad(table.chain_count, 0);
                    for (int v = 0; v < g->n_vars; ++v)
                        if (!out.recovered[v]) chain_bad[g->var_chain[v]] = 1;
                    for (int c = 0; c < table.chain_count; ++c)
                        if (chain_bad[c]) chain_fails[w][c]++;
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

}  // namespace scldpc
