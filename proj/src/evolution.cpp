#include "scldpc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scldpc {

namespace {

struct Supports {
    int dim = 0;
    std::vector<std::vector<int>> row;  // row u -> columns q with T[u][q] = 1
    std::vector<std::vector<int>> col;  // column q -> rows m with T[m][q] = 1

    explicit Supports(const ConnectivityMatrix& T) : dim(T.dim), row(T.dim), col(T.dim) {
        for (int u = 0; u < T.dim; ++u)
            for (int q = 0; q < T.dim; ++q)
                if (T.at(u, q)) {
                    row[u].push_back(q);
                    col[q].push_back(u);
                }
    }
};

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Single peeling iteration's expected DD change given the current state,
// with position sums already at hand. Writes into out.
void rates(const DDState& s, const Supports& sup, double denom_guard, RateDelta& out) {
    const int D = s.dim;
    const int rmax = s.rmax;
    out.dv.assign(D, 0.0);
    out.dr.assign(s.r.size(), 0.0);
    out.stalled = false;

    double r1tot = 0.0;
    for (int u = 0; u < D; ++u) r1tot += s.rj(u, 1);
    if (r1tot <= 0.0) {
        out.stalled = true;
        return;
    }

    // sm[m] = p_m / (number of variables adjacent to check position m)
    std::vector<double> sm(D, 0.0);
    for (int m = 0; m < D; ++m) {
        const double pm = s.rj(m, 1) / r1tot;
        if (pm == 0.0) continue;
        double denom = 0.0;
        for (int q : sup.row[m]) denom += s.v[q];
        if (denom < denom_guard) continue;
        sm[m] = pm / denom;
    }

    // w[q] = sum_m p_m lambda_{m,q}: probability the removed variable sits at q.
    std::vector<double> w(D, 0.0);
    for (int q = 0; q < D; ++q) {
        if (s.v[q] == 0.0) continue;
        double acc = 0.0;
        for (int m : sup.col[q]) acc += sm[m];
        w[q] = s.v[q] * acc;
    }

    for (int u = 0; u < D; ++u) {
        out.dv[u] = -w[u];

        double total = 0.0;
        for (int j = 1; j <= rmax; ++j) total += s.rj(u, j);
        const double pu = s.rj(u, 1) / r1tot;
        if (total < denom_guard) continue;

        // p * xi_u: expected edges lost at position u per iteration.
        double pxi = 0.0;
        for (int q : sup.row[u]) pxi += w[q];
        const double g = pxi - pu;

        for (int j = 1; j <= rmax; ++j) {
            const double rnext = j < rmax ? s.rj(u, j + 1) : 0.0;
            double d = j * (rnext - s.rj(u, j)) / total * g;
            if (j == 1) d -= pu;
            out.dr[static_cast<std::size_t>(u) * rmax + (j - 1)] = d;
        }
    }
}

std::vector<int> layer_of_position(const ConnectivityMatrix& T) {
    const std::vector<int> chain = T.chain_of_position();
    const std::vector<int> layer = T.layer_of_chain();
    std::vector<int> lp(T.dim, 0);
    for (int u = 0; u < T.dim; ++u) {
        const int c = chain[u];
        lp[u] = (T.family == Family::loop) ? c : layer[c];
    }
    return lp;
}

int layer_count(const ConnectivityMatrix& T) {
    if (T.family == Family::loop) return 2;
    if (T.family == Family::multilayer) return T.N;
    return 1;
}

}  // namespace

DDState init_state(const ConnectivityMatrix& T, double eps) {
    if (eps < 0.0 || eps > 1.0) throw parameter_error("erasure probability must lie in [0, 1]");
    const DegreeProfile dp = degree_profile(T);
    DDState s;
    s.dim = T.dim;
    s.rmax = T.r;
    s.v.assign(T.dim, 0.0);
    s.r.assign(static_cast<std::size_t>(T.dim) * T.r, 0.0);
    if (eps == 0.0) {
        s.trivially_decoded = true;
        return s;
    }
    const double lr = static_cast<double>(T.l) / T.r;
    for (int u = 0; u < T.dim; ++u) {
        s.v[u] = dp.occupied[u] ? 1.0 : 0.0;
        const int k = dp.check_degree[u];
        for (int j = 1; j <= std::min(k, T.r); ++j) {
            // j * (l/r) * C(k, j) * eps^j (1-eps)^(k-j) / eps
            s.rj(u, j) = j * lr * binom(k, j) * std::pow(eps, j - 1) * std::pow(1.0 - eps, k - j);
        }
    }
    return s;
}

RateDelta step_expectation(const DDState& state, const ConnectivityMatrix& T) {
    Supports sup(T);
    RateDelta out;
    rates(state, sup, 1e-12, out);
    return out;
}

double r1_total(const DDState& state) {
    double s = 0.0;
    for (int u = 0; u < state.dim; ++u) s += state.rj(u, 1);
    return s;
}

std::vector<double> per_layer_r1(const DDState& state, const std::vector<int>& lp, int layers) {
    if (static_cast<int>(lp.size()) != state.dim) throw parameter_error("layer map size mismatch");
    std::vector<double> out(layers, 0.0);
    for (int u = 0; u < state.dim; ++u) {
        if (lp[u] < 0 || lp[u] >= layers) throw parameter_error("layer map is not a partition into the given layers");
        out[lp[u]] += state.rj(u, 1);
    }
    return out;
}

std::vector<double> per_layer_v(const DDState& state, const std::vector<int>& lp, int layers) {
    if (static_cast<int>(lp.size()) != state.dim) throw parameter_error("layer map size mismatch");
    std::vector<double> out(layers, 0.0);
    for (int u = 0; u < state.dim; ++u) {
        if (lp[u] < 0 || lp[u] >= layers) throw parameter_error("layer map is not a partition into the given layers");
        out[lp[u]] += state.v[u];
    }
    return out;
}

double v_outer(const DDState& state, const std::vector<int>& outer_positions) {
    double s = 0.0;
    for (int u : outer_positions) {
        if (u < 0 || u >= state.dim) throw parameter_error("outer position out of range");
        s += state.v[u];
    }
    return s;
}

Trajectory integrate(const ConnectivityMatrix& T, double eps, const EvoOptions& opts) {
    if (eps < 0.0 || eps > 1.0) throw parameter_error("erasure probability must lie in [0, 1]");
    if (opts.step_scale <= 0.0) throw parameter_error("step scale must be positive");

    Trajectory traj;
    traj.epsilon = eps;

    DDState s = init_state(T, eps);
    const DegreeProfile dp = degree_profile(T);
    const int occ = dp.occupied_count();
    const std::vector<int> lp = layer_of_position(T);
    const int layers = layer_count(T);
    std::vector<int> outer;
    if (T.family == Family::loop) outer = loop_outer_positions(T);

    for (int u : opts.watch_positions)
        if (u < 0 || u >= T.dim) throw parameter_error("watch position out of range");

    auto record = [&](const DDState& st) {
        TrajectorySample smp;
        smp.tau = st.tau;
        smp.r1_total = std::max(0.0, r1_total(st));  // signed drain noise stays internal
        smp.v_total = 0.0;
        for (double x : st.v) smp.v_total += x;
        smp.r1_layer = per_layer_r1(st, lp, layers);
        for (double& x : smp.r1_layer) x = std::max(0.0, x);
        smp.v_layer = per_layer_v(st, lp, layers);
        smp.v_outer = outer.empty() ? 0.0 : v_outer(st, outer);
        for (int u : opts.watch_positions) smp.v_watch += st.v[u];
        traj.samples.push_back(std::move(smp));
    };

    if (eps == 0.0 || occ == 0) {
        traj.outcome = EvoOutcome::decoded;
        record(s);
        traj.final_state = std::move(s);
        return traj;
    }

    const Supports sup(T);
    const double step = opts.step_scale * occ;
    const double tau_cap = occ + 1.0;
    RateDelta d;
    long step_index = 0;

    record(s);
    while (true) {
        double vsum = 0.0;
        for (double x : s.v) vsum += x;
        const double r1 = r1_total(s);
        if (!std::isfinite(vsum) || !std::isfinite(r1))
            throw integration_error("mean evolution diverged; reduce the step size");
        if (vsum <= opts.v_tol) {
            traj.outcome = EvoOutcome::decoded;
            break;
        }
        // A stall strands a bulk fraction of the variables; a vanishing
        // residue only means the final drain ran out of resolution.
        const bool bulk_left = vsum > 0.5;
        if (s.tau > tau_cap) {
            traj.outcome = bulk_left ? EvoOutcome::stalled : EvoOutcome::decoded;
            break;
        }
        if (r1 <= opts.r_tol) {
            traj.outcome = bulk_left ? EvoOutcome::stalled : EvoOutcome::decoded;
            break;
        }

        rates(s, sup, opts.denom_guard, d);
        if (d.stalled) {
            traj.outcome = bulk_left ? EvoOutcome::stalled : EvoOutcome::decoded;
            break;
        }
        // v is clamped at zero; the edge counts are left free so that the
        // degree-one total can cross zero, which is the stall event. Flooring
        // them would feed phantom degree-one mass back into the system and
        // let supercritical runs crawl through the critical phase.
        for (int u = 0; u < s.dim; ++u) {
            s.v[u] = std::max(0.0, s.v[u] + step * d.dv[u]);
            for (int j = 1; j <= s.rmax; ++j) {
                double& x = s.rj(u, j);
                x += step * d.dr[static_cast<std::size_t>(u) * s.rmax + (j - 1)];
            }
        }
        s.tau += step;
        ++step_index;
        if (step_index % opts.sample_stride == 0) record(s);
    }
    if (traj.samples.empty() || traj.samples.back().tau != s.tau) record(s);
    traj.end_tau = s.tau;
    traj.final_state = std::move(s);
    return traj;
}

DipVerdict dip_verdict(const Trajectory& traj, const EvoOptions& opts) {
    DipVerdict v;
    const auto& smp = traj.samples;
    if (smp.size() < 3) return v;
    const double end = traj.end_tau;
    double dip = std::numeric_limits<double>::max();
    double dip_tau = 0.0;
    for (const auto& s : smp) {
        if (s.tau < 0.5 || s.tau > end - 0.5) continue;
        if (s.r1_total < dip) {
            dip = s.r1_total;
            dip_tau = s.tau;
        }
    }
    if (dip == std::numeric_limits<double>::max()) return v;
    double regrow = 0.0;
    for (const auto& s : smp)
        if (s.tau > dip_tau && s.tau < end - 0.5) regrow = std::max(regrow, s.r1_total);
    v.dip_tau = dip_tau;
    v.dip_value = dip;
    v.spurious = dip <= opts.dip_ceiling && regrow >= opts.dip_regrow_factor * std::max(dip, 0.0);
    return v;
}

namespace {

ThresholdResult bisect(const ConnectivityMatrix& T, double tol, const EvoOptions& opts,
                       const std::function<bool(const Trajectory&)>& feasible) {
    if (tol <= 0.0) throw parameter_error("bisection tolerance must be positive");
    double lo = 0.0, hi = 1.0;
    int probes = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        Trajectory traj;
        try {
            traj = integrate(T, mid, opts);
        } catch (const integration_error& e) {
            throw integration_error(std::string(e.what()) + " (at probe eps = " + std::to_string(mid) + ")");
        }
        ++probes;
        if (feasible(traj))
            lo = mid;
        else
            hi = mid;
    }
    ThresholdResult res;
    res.epsilon_star = 0.5 * (lo + hi);
    res.bracket_width = hi - lo;
    res.trajectories_evaluated = probes;
    return res;
}

}  // namespace

ThresholdResult threshold(const ConnectivityMatrix& T, double tol, const EvoOptions& opts) {
    return bisect(T, tol, opts, [&](const Trajectory& traj) {
        return traj.outcome == EvoOutcome::decoded && !dip_verdict(traj, opts).spurious;
    });
}

ThresholdResult decodable_region_epsilon(const ConnectivityMatrix& T, const std::vector<int>& positions,
                                         double tol, const EvoOptions& opts) {
    if (positions.empty()) throw parameter_error("decodable region needs a nonempty position set");
    for (int u : positions)
        if (u < 0 || u >= T.dim) throw parameter_error("decodable region position out of range");
    EvoOptions watched = opts;
    watched.watch_positions = positions;
    // The set must empty before the trajectory leaves the trustworthy
    // regime: before a stall and before any collapse-and-regrow dip.
    return bisect(T, tol, watched, [&](const Trajectory& traj) {
        const DipVerdict dv = dip_verdict(traj, watched);
        const double horizon = dv.spurious ? dv.dip_tau : std::numeric_limits<double>::max();
        for (const auto& s : traj.samples)
            if (s.v_watch <= 1e-3 && s.tau <= horizon) return true;
        return false;
    });
}

CriticalReport critical_report(const Trajectory& traj, const CriticalOptions& opts) {
    CriticalReport rep;
    rep.from_stalled_prefix = traj.outcome == EvoOutcome::stalled;
    const auto& smp = traj.samples;
    const int n = static_cast<int>(smp.size());
    if (n < 3) return rep;

    // Longest flat stretch of r1(tau).
    double best_start = 0.0, best_end = 0.0;
    {
        double run_start = -1.0, run_end = -1.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double slope =
                (smp[i + 1].r1_total - smp[i - 1].r1_total) / (smp[i + 1].tau - smp[i - 1].tau);
            if (std::abs(slope) <= opts.plateau_slope_tol) {
                if (run_start < 0.0) run_start = smp[i].tau;
                run_end = smp[i].tau;
            } else if (run_start >= 0.0) {
                if (run_end - run_start > best_end - best_start) {
                    best_start = run_start;
                    best_end = run_end;
                }
                run_start = run_end = -1.0;
            }
        }
        if (run_start >= 0.0 && run_end - run_start > best_end - best_start) {
            best_start = run_start;
            best_end = run_end;
        }
    }
    if (best_end - best_start >= opts.plateau_min_span) {
        rep.regime = Regime::steady_state_phase;
        rep.plateau_start = best_start;
        rep.plateau_end = best_end;
    }

    // Strict interior local minima, filtered by prominence so that plateau
    // ripple does not register.
    const double prom_tol = 1e-5;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(smp[i].r1_total <= smp[i - 1].r1_total && smp[i].r1_total <= smp[i + 1].r1_total)) continue;
        if (smp[i].r1_total == smp[i - 1].r1_total) continue;  // report flats once, at their left edge
        double left_max = smp[i].r1_total;
        for (int j = i - 1; j >= 0; --j) left_max = std::max(left_max, smp[j].r1_total);
        double right_max = smp[i].r1_total;
        for (int j = i + 1; j < n; ++j) right_max = std::max(right_max, smp[j].r1_total);
        const double prominence = std::min(left_max, right_max) - smp[i].r1_total;
        if (prominence >= prom_tol) rep.minima.push_back({smp[i].tau, smp[i].r1_total});
    }
    return rep;
}

}  // namespace scldpc
