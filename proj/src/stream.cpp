#include "scldpc/stream.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "scldpc/rng.hpp"

namespace scldpc {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Children of each chain block and the parent-position anchor coupling them.
struct StackLayout {
    int chains = 1;
    int block = 0;  // positions per chain, L + 2
    std::vector<std::vector<std::pair<int, int>>> children;  // chain -> (child chain, anchor)
};

StackLayout stack_layout(const ConnectivityMatrix& T) {
    StackLayout s;
    s.chains = T.chain_count();
    s.block = T.dim / s.chains;
    s.children.resize(s.chains);
    if (T.family == Family::multilayer && T.N > 1) {
        std::vector<int> anchors(T.t);
        for (int k = 1; k <= T.t; ++k) anchors[k - 1] = ceil_div(k * T.L, T.t + 1);
        std::vector<int> layer_first;
        int total = 0, width = 1;
        for (int j = 0; j < T.N; ++j) {
            layer_first.push_back(total);
            total += width;
            width *= T.t;
        }
        width = 1;
        for (int j = 0; j + 1 < T.N; ++j) {
            for (int c = 0; c < width; ++c) {
                const int parent = layer_first[j] + c;
                for (int k = 0; k < T.t; ++k)
                    s.children[parent].push_back({layer_first[j + 1] + c * T.t + k, anchors[k]});
            }
            width *= T.t;
        }
    }
    return s;
}

struct WindowPlan {
    int block = 0;
    std::vector<int> decode_positions;  // occupied global positions, decode order
    std::vector<int> arrival_rank;      // per global position
};

WindowPlan plan_windows(const TannerGraph& g, const ConnectivityMatrix& T,
                        const TransmissionSchedule& schedule) {
    const StackLayout lay = stack_layout(T);
    const DegreeProfile dp = degree_profile(T);

    const TransmissionSchedule canon =
        T.family == Family::multilayer ? transmission_schedule(T) : natural_schedule(T);
    if (schedule.order.size() != canon.order.size() ||
        !std::equal(schedule.order.begin(), schedule.order.end(), canon.order.begin()))
        throw stream_order_error("channel stream order does not match the transmission schedule");

    WindowPlan plan;
    plan.block = lay.block;
    plan.arrival_rank.assign(g.dim, g.dim + 1);
    for (std::size_t i = 0; i < schedule.order.size(); ++i) {
        const SubBlock& b = schedule.order[i];
        const int gp = (b.chain - 1) * lay.block + b.position - 1;
        if (plan.arrival_rank[gp] <= g.dim) throw stream_order_error("schedule repeats a sub-block");
        plan.arrival_rank[gp] = static_cast<int>(i);
    }
    for (int c = 0; c < lay.chains; ++c)
        for (int pos = 1; pos <= lay.block; ++pos) {
            const int gp = c * lay.block + pos - 1;
            if (dp.occupied[gp]) {
                if (plan.arrival_rank[gp] > g.dim)
                    throw stream_order_error("schedule misses an occupied sub-block");
                plan.decode_positions.push_back(gp);
            }
        }
    return plan;
}

// Checks touching at least one variable at an active position. Deduplicated
// via a stamp array.
void collect_candidates(const TannerGraph& g, const std::vector<std::uint8_t>& active_pos,
                        std::vector<int>& stamp, int tick, std::vector<int>& out) {
    out.clear();
    for (int u = 0; u < g.dim; ++u) {
        if (!active_pos[u]) continue;
        const int lo = g.first_var_of_position(u), hi = lo + g.vars_at_position(u);
        for (int v = lo; v < hi; ++v)
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) {
                const int c = g.var_adj[e];
                if (stamp[c] != tick) {
                    stamp[c] = tick;
                    out.push_back(c);
                }
            }
    }
}

}  // namespace

TransmissionSchedule transmission_schedule(const ConnectivityMatrix& T) {
    if (T.family != Family::multilayer)
        throw parameter_error("transmission schedule is defined for the multilayer family");
    const StackLayout lay = stack_layout(T);
    const int L = T.L;

    TransmissionSchedule sched;
    for (int c = 0; c < lay.chains; ++c) {
        const int first = c == 0 ? 2 : 3;  // boundary blocks of child chains are hoisted
        const int last = c == 0 ? L + 1 : L;
        std::size_t next_child = 0;
        for (int pos = first; pos <= last; ++pos) {
            sched.order.push_back({c + 1, pos});
            while (next_child < lay.children[c].size() &&
                   pos == lay.children[c][next_child].second + 3) {
                const int child = lay.children[c][next_child].first + 1;
                sched.order.push_back({child, 2});
                sched.order.push_back({child, L + 1});
                ++next_child;
            }
        }
    }
    return sched;
}

TransmissionSchedule natural_schedule(const ConnectivityMatrix& T) {
    const StackLayout lay = stack_layout(T);
    const DegreeProfile dp = degree_profile(T);
    TransmissionSchedule sched;
    for (int c = 0; c < lay.chains; ++c)
        for (int pos = 1; pos <= lay.block; ++pos)
            if (dp.occupied[c * lay.block + pos - 1]) sched.order.push_back({c + 1, pos});
    return sched;
}

WindowBecOutcome window_decode_bec(const TannerGraph& g, const ConnectivityMatrix& T,
                                   const std::vector<std::uint8_t>& erased,
                                   const TransmissionSchedule& schedule, int W, const BPConfig& cfg) {
    if (W < T.l + 1) throw parameter_error("window width must be at least l + 1");
    const WindowPlan plan = plan_windows(g, T, schedule);
    const int n_dp = static_cast<int>(plan.decode_positions.size());
    const int width = std::min(W, n_dp);

    WindowBecOutcome out;
    out.recovered.assign(g.n_vars, 0);
    for (int v = 0; v < g.n_vars; ++v) out.recovered[v] = erased[v] ? 0 : 1;

    std::vector<std::uint8_t> arrived(g.dim, 0);
    std::vector<std::uint8_t> active_pos(g.dim, 0);
    std::vector<int> stamp(g.n_checks, -1);
    std::vector<int> candidates;
    int ingested = 0;

    for (int s = 0;; ++s) {
        const int e = std::min(s + width, n_dp);
        int max_rank = -1;
        for (int i = s; i < e; ++i)
            max_rank = std::max(max_rank, plan.arrival_rank[plan.decode_positions[i]]);
        for (; ingested <= max_rank; ++ingested) {
            const SubBlock& b = schedule.order[ingested];
            arrived[(b.chain - 1) * plan.block + b.position - 1] = 1;
        }
        std::fill(active_pos.begin(), active_pos.end(), 0);
        for (int i = s; i < e; ++i) active_pos[plan.decode_positions[i]] = 1;
        collect_candidates(g, active_pos, stamp, s, candidates);

        for (int round = 0; round < cfg.max_iterations; ++round) {
            long long recovered_this_round = 0;
            for (int c : candidates) {
                int n_unknown = 0, pinned = -1;
                bool usable = true;
                for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k) {
                    const int v = g.check_adj[k];
                    if (!arrived[g.var_pos[v]]) {
                        usable = false;
                        break;
                    }
                    if (!out.recovered[v]) {
                        ++n_unknown;
                        pinned = v;
                        if (n_unknown > 1) break;
                    }
                }
                if (usable && n_unknown == 1 && active_pos[g.var_pos[pinned]]) {
                    out.recovered[pinned] = 1;
                    ++recovered_this_round;
                }
            }
            if (recovered_this_round == 0) break;
        }
        ++out.windows;
        if (e == n_dp) break;  // rightmost window: remaining positions commit as-is
    }

    for (int v = 0; v < g.n_vars; ++v)
        if (!out.recovered[v]) ++out.residual_erasures;
    out.success = out.residual_erasures == 0;
    return out;
}

WindowAwgnOutcome window_decode_biawgn(const TannerGraph& g, const ConnectivityMatrix& T,
                                       const std::vector<double>& channel_llrs,
                                       const TransmissionSchedule& schedule, int W, const BPConfig& cfg) {
    if (W < T.l + 1) throw parameter_error("window width must be at least l + 1");
    const WindowPlan plan = plan_windows(g, T, schedule);
    const int n_dp = static_cast<int>(plan.decode_positions.size());
    const int width = std::min(W, n_dp);
    const int E = g.edge_count();

    auto clip = [&](double x) {
        return x < -cfg.llr_clip ? -cfg.llr_clip : (x > cfg.llr_clip ? cfg.llr_clip : x);
    };

    WindowAwgnOutcome out;
    out.hard.assign(g.n_vars, 0);
    std::vector<double> v2c(E, 0.0), c2v(E, 0.0);
    std::vector<std::uint8_t> arrived(g.dim, 0), active_pos(g.dim, 0);
    std::vector<std::uint8_t> committed(g.n_vars, 0);
    std::vector<int> stamp(g.n_checks, -1);
    std::vector<int> candidates;
    std::vector<double> tnh;
    int ingested = 0;

    auto freeze_var = [&](int v, double value) {
        for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) v2c[e] = clip(value);
    };

    for (int s = 0;; ++s) {
        const int e_hi = std::min(s + width, n_dp);
        int max_rank = -1;
        for (int i = s; i < e_hi; ++i)
            max_rank = std::max(max_rank, plan.arrival_rank[plan.decode_positions[i]]);
        for (; ingested <= max_rank; ++ingested) {
            const SubBlock& b = schedule.order[ingested];
            const int gp = (b.chain - 1) * plan.block + b.position - 1;
            arrived[gp] = 1;
            const int lo = g.first_var_of_position(gp), hi = lo + g.vars_at_position(gp);
            for (int v = lo; v < hi; ++v) {
                freeze_var(v, channel_llrs[v]);
                out.hard[v] = channel_llrs[v] < 0.0 ? 1 : 0;
            }
        }
        std::fill(active_pos.begin(), active_pos.end(), 0);
        for (int i = s; i < e_hi; ++i) active_pos[plan.decode_positions[i]] = 1;
        collect_candidates(g, active_pos, stamp, s, candidates);

        for (int iter = 0; iter < cfg.max_iterations; ++iter) {
            for (int c : candidates) {
                bool usable = true;
                for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
                    if (!arrived[g.var_pos[g.check_adj[k]]]) {
                        usable = false;
                        break;
                    }
                if (!usable) continue;
                const int lo = g.check_off[c], hi = g.check_off[c + 1];
                const int deg = hi - lo;
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
                    c2v[e] = clip(2.0 * std::atanh(bounded));
                }
            }
            bool changed = false;
            for (int i = s; i < e_hi; ++i) {
                const int gp = plan.decode_positions[i];
                const int lo = g.first_var_of_position(gp), hi = lo + g.vars_at_position(gp);
                for (int v = lo; v < hi; ++v) {
                    if (committed[v]) continue;
                    double total = channel_llrs[v];
                    for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) total += c2v[e];
                    const std::uint8_t h = total < 0.0 ? 1 : 0;
                    if (h != out.hard[v]) changed = true;
                    out.hard[v] = h;
                    for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) v2c[e] = clip(total - c2v[e]);
                }
            }
            if (cfg.early_stop && !changed && iter > 0) break;
        }

        // Commit the leftmost position before shifting.
        const int gp = plan.decode_positions[s];
        const int lo = g.first_var_of_position(gp), hi = lo + g.vars_at_position(gp);
        for (int v = lo; v < hi; ++v) {
            committed[v] = 1;
            freeze_var(v, out.hard[v] ? -cfg.llr_clip : cfg.llr_clip);
        }
        ++out.windows;
        if (e_hi == n_dp) {
            for (int i = s; i < e_hi; ++i) {
                const int q = plan.decode_positions[i];
                for (int v = g.first_var_of_position(q); v < g.first_var_of_position(q) + g.vars_at_position(q); ++v)
                    committed[v] = 1;
            }
            break;
        }
    }

    out.all_zero = true;
    for (int v = 0; v < g.n_vars; ++v)
        if (out.hard[v]) out.all_zero = false;
    return out;
}

std::vector<WindowCompareRow> window_compare_bec(const ConnectivityMatrix& T, int M,
                                                 const std::vector<double>& eps_grid, long long trials,
                                                 std::uint64_t base_seed, int W, const BPConfig& cfg,
                                                 const TrialOptions& opts) {
    const TransmissionSchedule sched =
        T.family == Family::multilayer ? transmission_schedule(T) : natural_schedule(T);
    std::vector<WindowCompareRow> rows;
    for (std::size_t gi = 0; gi < eps_grid.size(); ++gi) {
        const double eps = eps_grid[gi];
        const int workers =
            opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
        std::vector<long long> f_full(std::max(1, workers), 0), f_win(std::max(1, workers), 0),
            mism(std::max(1, workers), 0);
        parallel_chunks(trials, workers, [&](long long lo, long long hi, int w) {
            for (long long t = lo; t < hi; ++t) {
                std::mt19937_64 rng = trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                TannerGraph g = sample_graph(T, M, rng, opts.avoid_4cycles);
                const auto erased = apply_bec(g, eps, rng);
                const BecBPOutcome full = bp_decode_bec(g, erased, cfg);
                const WindowBecOutcome win = window_decode_bec(g, T, erased, sched, W, cfg);
                if (!full.success) f_full[w]++;
                if (!win.success) f_win[w]++;
                if (full.success != win.success) mism[w]++;
            }
        });
        WindowCompareRow row;
        row.param = eps;
        row.trials = trials;
        for (std::size_t w = 0; w < f_full.size(); ++w) {
            row.failures_full += f_full[w];
            row.failures_window += f_win[w];
            row.outcome_mismatches += mism[w];
        }
        row.bler_full = static_cast<double>(row.failures_full) / trials;
        row.bler_window = static_cast<double>(row.failures_window) / trials;
        row.ci_full = wilson_ci(row.failures_full, trials);
        row.ci_window = wilson_ci(row.failures_window, trials);
        rows.push_back(row);
    }
    return rows;
}

namespace {

template <typename TrialFn>
BlerTable window_campaign(const ConnectivityMatrix& T, const std::vector<double>& grid,
                          long long trials, const std::string& param_name, const TrialOptions& opts,
                          TrialFn&& trial) {
    if (trials < 1) throw parameter_error("trials must be >= 1");
    if (grid.empty()) throw parameter_error("empty parameter grid");
    BlerTable table;
    table.param_name = param_name;
    table.chain_count = T.chain_count();
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const int workers =
            opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
        std::vector<long long> fails(std::max(1, workers), 0);
        std::vector<std::vector<long long>> chain_fails(std::max(1, workers),
                                                        std::vector<long long>(table.chain_count, 0));
        parallel_chunks(trials, workers, [&](long long lo, long long hi, int w) {
            std::vector<std::uint8_t> chain_bad;
            for (long long t = lo; t < hi; ++t) {
                chain_bad.assign(table.chain_count, 0);
                if (!trial(gi, t, chain_bad)) {
                    fails[w]++;
                    for (int c = 0; c < table.chain_count; ++c)
                        if (chain_bad[c]) chain_fails[w][c]++;
                }
            }
        });
        BlerRow row;
        row.param = grid[gi];
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

}  // namespace

BlerTable bec_window_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& eps_grid,
                            long long trials, std::uint64_t base_seed, int W, const BPConfig& cfg,
                            const TrialOptions& opts) {
    const TransmissionSchedule sched =
        T.family == Family::multilayer ? transmission_schedule(T) : natural_schedule(T);
    return window_campaign(T, eps_grid, trials, "eps", opts,
                           [&](std::size_t gi, long long t, std::vector<std::uint8_t>& chain_bad) {
                               std::mt19937_64 rng =
                                   trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                               TannerGraph g = sample_graph(T, M, rng, opts.avoid_4cycles);
                               const auto erased = apply_bec(g, eps_grid[gi], rng);
                               const WindowBecOutcome out = window_decode_bec(g, T, erased, sched, W, cfg);
                               if (!out.success)
                                   for (int v = 0; v < g.n_vars; ++v)
                                       if (!out.recovered[v]) chain_bad[g.var_chain[v]] = 1;
                               return out.success;
                           });
}

BlerTable awgn_window_trials(const ConnectivityMatrix& T, int M, const std::vector<double>& ebn0_grid,
                             long long trials, std::uint64_t base_seed, int W, const BPConfig& cfg,
                             const TrialOptions& opts) {
    const TransmissionSchedule sched =
        T.family == Family::multilayer ? transmission_schedule(T) : natural_schedule(T);
    const double rate = design_rate(T).value();
    return window_campaign(T, ebn0_grid, trials, "ebn0", opts,
                           [&](std::size_t gi, long long t, std::vector<std::uint8_t>& chain_bad) {
                               const double sigma2 =
                                   1.0 / (2.0 * rate * std::pow(10.0, ebn0_grid[gi] / 10.0));
                               const double sigma = std::sqrt(sigma2);
                               std::mt19937_64 rng =
                                   trial_engine(base_seed, gi, static_cast<std::uint64_t>(t));
                               TannerGraph g = sample_graph(T, M, rng, opts.avoid_4cycles);
                               std::vector<double> llr(g.n_vars);
                               std::normal_distribution<double> noise(0.0, sigma);
                               for (int v = 0; v < g.n_vars; ++v) llr[v] = 2.0 * (1.0 + noise(rng)) / sigma2;
                               const WindowAwgnOutcome out =
                                   window_decode_biawgn(g, T, llr, sched, W, cfg);
                               if (!out.all_zero)
                                   for (int v = 0; v < g.n_vars; ++v)
                                       if (out.hard[v]) chain_bad[g.var_chain[v]] = 1;
                               return out.all_zero;
                           });
}

}  // namespace scldpc
