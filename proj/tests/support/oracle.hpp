#pragma once

// Independent reference implementations used by tests only: a one-step
// peeling oracle on multiset-realized graphs, a BFS 4-cycle search, a
// high-resolution quadrature, and exact MAP marginals on small graphs.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "scldpc/ensemble.hpp"
#include "scldpc/graph.hpp"

namespace oracle {

struct IntDD {
    std::vector<long long> V;                 // per position
    std::vector<std::vector<long long>> R;    // [position][degree-1], edges of right degree j
};

struct OneStepStats {
    std::vector<double> mean_dv, se_dv;
    std::vector<double> mean_dr, se_dr;  // position-major, degree-minor
    long long samples = 0;
};

// Consistency of an integer DD with T: every surviving variable keeps one
// edge to each position of its column support, and checks of degree j carry
// j edges each.
inline void check_realizable(const scldpc::ConnectivityMatrix& T, const IntDD& dd) {
    for (int u = 0; u < T.dim; ++u) {
        long long incoming = 0;
        for (int q = 0; q < T.dim; ++q)
            if (T.at(u, q)) incoming += dd.V[q];
        long long edges = 0;
        for (int j = 1; j <= T.r; ++j) {
            if (dd.R[u][j - 1] % j != 0) throw std::invalid_argument("R_{j,u} not divisible by j");
            edges += dd.R[u][j - 1];
        }
        if (incoming != edges) throw std::invalid_argument("DD not realizable: socket mismatch");
    }
}

// Averages the one-step DD change of peeling decoding over fresh multiset
// realizations of the DD.
inline OneStepStats one_step_mc(const scldpc::ConnectivityMatrix& T, const IntDD& dd,
                                long long samples, std::uint64_t seed) {
    check_realizable(T, dd);
    const int D = T.dim;
    const int rmax = T.r;
    std::mt19937_64 rng(seed);

    std::vector<std::vector<int>> col_support(D), row_support(D);
    for (int u = 0; u < D; ++u)
        for (int q = 0; q < D; ++q)
            if (T.at(u, q)) {
                row_support[u].push_back(q);
                col_support[q].push_back(u);
            }

    // Per position: check degrees (one entry per check) and a socket pool
    // listing the owning check of every edge slot.
    std::vector<std::vector<int>> check_deg(D);
    std::vector<std::vector<int>> sockets(D);
    std::vector<int> deg1_first(D, -1);  // degree-one checks are placed first
    long long r1_total = 0;
    for (int u = 0; u < D; ++u) {
        for (int j = 1; j <= rmax; ++j) {
            const long long n_checks = dd.R[u][j - 1] / j;
            for (long long c = 0; c < n_checks; ++c) check_deg[u].push_back(j);
        }
        std::sort(check_deg[u].begin(), check_deg[u].end());
        r1_total += dd.R[u][0];
        for (int c = 0; c < static_cast<int>(check_deg[u].size()); ++c)
            for (int s = 0; s < check_deg[u][c]; ++s) sockets[u].push_back(c);
        (void)deg1_first;
    }
    if (r1_total == 0) throw std::invalid_argument("no degree-one checks in the oracle state");

    // Variable ids per position are 0..V_q-1; incoming edge order at every
    // position is (q ascending, variable index ascending).
    std::vector<std::vector<int>> edge_check(D);  // assignment per sample
    std::vector<long long> var_base(D, 0);
    std::vector<std::vector<long long>> var_offset_at(D, std::vector<long long>(D, -1));
    for (int u = 0; u < D; ++u) {
        long long off = 0;
        for (int q : row_support[u]) {
            var_offset_at[u][q] = off;
            off += dd.V[q];
        }
    }

    const std::size_t n_dr = static_cast<std::size_t>(D) * rmax;
    std::vector<double> sum_dv(D, 0.0), sq_dv(D, 0.0), sum_dr(n_dr, 0.0), sq_dr(n_dr, 0.0);
    std::vector<double> dv(D), dr(n_dr);

    for (long long s = 0; s < samples; ++s) {
        for (int u = 0; u < D; ++u) {
            edge_check[u] = sockets[u];
            std::shuffle(edge_check[u].begin(), edge_check[u].end(), rng);
        }
        std::fill(dv.begin(), dv.end(), 0.0);
        std::fill(dr.begin(), dr.end(), 0.0);

        // Uniform degree-one check across the whole graph.
        std::uniform_int_distribution<long long> pick(0, r1_total - 1);
        long long rsel = pick(rng);
        int m = 0;
        for (; m < D; ++m) {
            if (rsel < dd.R[m][0]) break;
            rsel -= dd.R[m][0];
        }
        const int target_check = static_cast<int>(rsel);  // degree-1 checks sit first after sort

        // Find the variable whose edge occupies the selected check's socket.
        int var_q = -1;
        long long var_i = -1;
        for (std::size_t e = 0; e < edge_check[m].size(); ++e) {
            if (edge_check[m][e] == target_check) {
                long long rem = static_cast<long long>(e);
                for (int q : row_support[m]) {
                    if (rem < dd.V[q]) {
                        var_q = q;
                        var_i = rem;
                        break;
                    }
                    rem -= dd.V[q];
                }
                break;
            }
        }

        // Remove the variable: each of its edges downgrades one check.
        for (int u : col_support[var_q]) {
            const long long e = var_offset_at[u][var_q] + var_i;
            const int c = edge_check[u][e];
            const int j = check_deg[u][c];
            dr[static_cast<std::size_t>(u) * rmax + (j - 1)] -= j;
            if (j >= 2) dr[static_cast<std::size_t>(u) * rmax + (j - 2)] += j - 1;
        }
        dv[var_q] -= 1.0;

        for (int u = 0; u < D; ++u) {
            sum_dv[u] += dv[u];
            sq_dv[u] += dv[u] * dv[u];
        }
        for (std::size_t i = 0; i < n_dr; ++i) {
            sum_dr[i] += dr[i];
            sq_dr[i] += dr[i] * dr[i];
        }
    }

    OneStepStats st;
    st.samples = samples;
    st.mean_dv.resize(D);
    st.se_dv.resize(D);
    st.mean_dr.resize(n_dr);
    st.se_dr.resize(n_dr);
    const double n = static_cast<double>(samples);
    for (int u = 0; u < D; ++u) {
        st.mean_dv[u] = sum_dv[u] / n;
        const double var = std::max(0.0, sq_dv[u] / n - st.mean_dv[u] * st.mean_dv[u]);
        st.se_dv[u] = std::sqrt(var / n);
    }
    for (std::size_t i = 0; i < n_dr; ++i) {
        st.mean_dr[i] = sum_dr[i] / n;
        const double var = std::max(0.0, sq_dr[i] / n - st.mean_dr[i] * st.mean_dr[i]);
        st.se_dr[i] = std::sqrt(var / n);
    }
    return st;
}

// Depth-2 BFS from every variable; a repeated level-2 variable reached via
// two different checks closes a 4-cycle.
inline bool has_4cycle_bfs(const scldpc::TannerGraph& g) {
    std::vector<int> via(g.n_vars, -1);
    std::vector<int> touched;
    for (int v = 0; v < g.n_vars; ++v) {
        touched.clear();
        for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) {
            const int c = g.var_adj[e];
            for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k) {
                const int w = g.check_adj[k];
                if (w == v) continue;
                if (via[w] >= 0 && via[w] != c) return true;
                if (via[w] < 0) {
                    via[w] = c;
                    touched.push_back(w);
                }
            }
        }
        for (int w : touched) via[w] = -1;
    }
    return false;
}

// Position-wise BEC density evolution for an arbitrary connectivity matrix:
// message-erasure fixpoint of the belief-propagation recursion. Independent
// of the peeling mean-evolution route. Runs a fixed large iteration budget
// so that slow near-threshold waves are not cut off.
inline bool de_decodes(const scldpc::ConnectivityMatrix& T, double eps, long iters = 400000,
                       double resolved = 1e-7) {
    const int D = T.dim;
    std::vector<int> dc(D, 0);
    std::vector<std::vector<int>> cols(D);
    for (int u = 0; u < D; ++u)
        for (int v = 0; v < D; ++v)
            if (T.at(u, v)) {
                dc[u]++;
                cols[v].push_back(u);
            }
    const int ratio = T.r / T.l;
    // y[u][v] compressed to column-major small vectors
    std::vector<std::vector<double>> y(D);
    for (int v = 0; v < D; ++v) y[v].assign(cols[v].size(), eps);
    std::vector<double> ybar(D), z(D);
    double ymax = 1.0;
    for (long it = 0; it < iters && ymax > resolved; ++it) {
        std::fill(ybar.begin(), ybar.end(), 0.0);
        for (int v = 0; v < D; ++v)
            for (std::size_t i = 0; i < cols[v].size(); ++i) ybar[cols[v][i]] += y[v][i];
        for (int u = 0; u < D; ++u) {
            if (dc[u] == 0) {
                z[u] = 0.0;
                continue;
            }
            const double yb = ybar[u] / dc[u];
            z[u] = 1.0 - std::pow(1.0 - yb, ratio * dc[u] - 1);
        }
        ymax = 0.0;
        for (int v = 0; v < D; ++v) {
            const std::size_t deg = cols[v].size();
            if (deg == 0) continue;
            for (std::size_t i = 0; i < deg; ++i) {
                double prod = eps;
                for (std::size_t k = 0; k < deg; ++k)
                    if (k != i) prod *= z[cols[v][k]];
                y[v][i] = prod;
                ymax = std::max(ymax, prod);
            }
        }
    }
    return ymax <= resolved;
}

inline double de_threshold(const scldpc::ConnectivityMatrix& T, double tol = 1e-4,
                           long iters = 400000) {
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (de_decodes(T, mid, iters))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Composite Simpson on a uniform grid in long double.
template <typename F>
long double simpson_fine(F f, long double a, long double b, int n_half) {
    const int n = 2 * n_half;
    const long double h = (b - a) / n;
    long double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0L : 2.0L);
    return s * h / 3.0L;
}

// Exact marginal LLRs by enumeration over all codeword candidates; feasible
// up to ~20 variables.
inline std::vector<double> map_marginals(const scldpc::TannerGraph& g,
                                         const std::vector<double>& llr) {
    if (g.n_vars > 22) throw std::invalid_argument("enumeration limited to 22 variables");
    std::vector<long double> w0(g.n_vars, 0.0L), w1(g.n_vars, 0.0L);
    for (std::uint32_t x = 0; x < (1u << g.n_vars); ++x) {
        bool ok = true;
        for (int c = 0; c < g.n_checks && ok; ++c) {
            int parity = 0;
            for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
                parity ^= (x >> g.check_adj[k]) & 1u;
            ok = parity == 0;
        }
        if (!ok) continue;
        long double logw = 0.0L;
        for (int v = 0; v < g.n_vars; ++v)
            if ((x >> v) & 1u) logw -= llr[v];
        const long double w = std::exp(logw);
        for (int v = 0; v < g.n_vars; ++v) {
            if ((x >> v) & 1u)
                w1[v] += w;
            else
                w0[v] += w;
        }
    }
    std::vector<double> out(g.n_vars);
    for (int v = 0; v < g.n_vars; ++v) out[v] = static_cast<double>(std::log(w0[v] / w1[v]));
    return out;
}

}  // namespace oracle
