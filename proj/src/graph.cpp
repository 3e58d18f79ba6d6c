#include "scldpc/graph.hpp"

#include <algorithm>
#include <unordered_map>

namespace scldpc {

namespace {

void build_check_side(TannerGraph& g) {
    std::vector<int> deg(g.n_checks, 0);
    for (int e = 0; e < g.edge_count(); ++e) deg[g.var_adj[e]]++;
    g.check_off.assign(g.n_checks + 1, 0);
    for (int c = 0; c < g.n_checks; ++c) g.check_off[c + 1] = g.check_off[c] + deg[c];
    g.check_edges.assign(g.edge_count(), 0);
    g.check_adj.assign(g.edge_count(), 0);
    std::vector<int> cursor(g.check_off.begin(), g.check_off.end() - 1);
    for (int v = 0; v < g.n_vars; ++v) {
        for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e) {
            const int c = g.var_adj[e];
            g.check_edges[cursor[c]] = e;
            g.check_adj[cursor[c]] = v;
            cursor[c]++;
        }
    }
}

}  // namespace

TannerGraph sample_graph(const ConnectivityMatrix& T, int M, std::mt19937_64& rng, bool avoid_4cycles) {
    if (M < T.r) throw parameter_error("M must be at least r");
    if ((static_cast<long long>(M) * T.l) % T.r != 0) throw parameter_error("M*(l/r) must be integral");
    const int checks_per_pos = static_cast<int>(static_cast<long long>(M) * T.l / T.r);
    const DegreeProfile dp = degree_profile(T);

    TannerGraph g;
    g.M = M;
    g.l = T.l;
    g.r = T.r;
    g.dim = T.dim;
    g.n_checks = checks_per_pos * T.dim;
    g.check_pos.resize(g.n_checks);
    for (int c = 0; c < g.n_checks; ++c) g.check_pos[c] = c / checks_per_pos;

    g.pos_var_off.assign(T.dim + 1, 0);
    for (int u = 0; u < T.dim; ++u) g.pos_var_off[u + 1] = g.pos_var_off[u] + (dp.occupied[u] ? M : 0);
    g.n_vars = g.pos_var_off[T.dim];
    g.var_pos.resize(g.n_vars);
    for (int u = 0; u < T.dim; ++u)
        for (int v = g.pos_var_off[u]; v < g.pos_var_off[u + 1]; ++v) g.var_pos[v] = u;

    const std::vector<int> chain = T.chain_of_position();
    g.chain_count = T.chain_count();
    g.var_chain.resize(g.n_vars);
    for (int v = 0; v < g.n_vars; ++v) g.var_chain[v] = chain[g.var_pos[v]];

    g.var_off.assign(g.n_vars + 1, 0);
    for (int v = 0; v < g.n_vars; ++v) g.var_off[v + 1] = g.var_off[v] + dp.d_v[g.var_pos[v]];
    g.var_adj.assign(g.var_off[g.n_vars], -1);

    // Socket pools: at check position u, every check exposes (r/l)*d_{c,u}
    // sockets; a uniform shuffle of the pool is a uniform matching.
    std::vector<std::vector<int>> pool(T.dim);
    for (int u = 0; u < T.dim; ++u) {
        const int sockets = (T.r / T.l) * dp.d_c[u];
        pool[u].reserve(static_cast<std::size_t>(sockets) * checks_per_pos);
        for (int k = 0; k < checks_per_pos; ++k)
            for (int sct = 0; sct < sockets; ++sct) pool[u].push_back(u * checks_per_pos + k);
        std::shuffle(pool[u].begin(), pool[u].end(), rng);
    }
    std::vector<std::size_t> next(T.dim, 0);
    for (int v = 0; v < g.n_vars; ++v) {
        const int pv = g.var_pos[v];
        int e = g.var_off[v];
        for (int u = 0; u < T.dim; ++u)
            if (T.at(u, pv)) g.var_adj[e++] = pool[u][next[u]++];
    }

    build_check_side(g);

    if (avoid_4cycles) remove_4cycles(g, rng);
    return g;
}

// Incremental expurgation: a pair count per unordered check pair seen at a
// variable; any pair counted twice closes a 4-cycle. One edge of the cycle
// is swapped with a uniformly chosen edge arriving at the same check
// position, all structures updated in place.
void remove_4cycles(TannerGraph& g, std::mt19937_64& rng) {
    const long long budget = 100LL * g.edge_count();
    long long redraws = 0;

    auto pair_key = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return static_cast<long long>(a) * g.n_checks + b;
    };
    std::unordered_map<long long, int> pairs;
    pairs.reserve(static_cast<std::size_t>(g.n_vars) * 4);
    std::vector<long long> offending;
    auto add_var_pairs = [&](int v, bool record) {
        for (int a = g.var_off[v]; a < g.var_off[v + 1]; ++a)
            for (int b = a + 1; b < g.var_off[v + 1]; ++b) {
                const long long key = pair_key(g.var_adj[a], g.var_adj[b]);
                if (++pairs[key] >= 2 && record) offending.push_back(key);
            }
    };
    auto drop_var_pairs = [&](int v) {
        for (int a = g.var_off[v]; a < g.var_off[v + 1]; ++a)
            for (int b = a + 1; b < g.var_off[v + 1]; ++b) --pairs[pair_key(g.var_adj[a], g.var_adj[b])];
    };
    for (int v = 0; v < g.n_vars; ++v) add_var_pairs(v, true);

    // Uniform edge at a check position = uniform variable among the columns
    // feeding it (each such variable holds exactly one edge there).
    std::vector<std::vector<std::pair<int, int>>> feeders(g.dim);  // (var range begin, end)
    {
        std::vector<std::vector<std::uint8_t>> col_hits(g.dim, std::vector<std::uint8_t>(g.dim, 0));
        for (int v = 0; v < g.n_vars; ++v) {
            // one representative per position suffices to learn the columns
            if (v > 0 && g.var_pos[v] == g.var_pos[v - 1]) continue;
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
                col_hits[g.check_pos[g.var_adj[e]]][g.var_pos[v]] = 1;
        }
        for (int u = 0; u < g.dim; ++u)
            for (int q = 0; q < g.dim; ++q)
                if (col_hits[u][q])
                    feeders[u].push_back({g.first_var_of_position(q),
                                          g.first_var_of_position(q) + g.vars_at_position(q)});
    }
    auto uniform_var_at = [&](int u) {
        long long total = 0;
        for (const auto& [b, e] : feeders[u]) total += e - b;
        std::uniform_int_distribution<long long> pick(0, total - 1);
        long long k = pick(rng);
        for (const auto& [b, e] : feeders[u]) {
            if (k < e - b) return b + static_cast<int>(k);
            k -= e - b;
        }
        return feeders[u].back().second - 1;
    };
    auto edge_at_position = [&](int v, int u) {
        for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
            if (g.check_pos[g.var_adj[e]] == u) return e;
        return -1;
    };
    auto check_slot_of_edge = [&](int c, int e) {
        for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
            if (g.check_edges[k] == e) return k;
        return -1;
    };

    while (!offending.empty()) {
        const long long key = offending.back();
        offending.pop_back();
        auto it = pairs.find(key);
        if (it == pairs.end() || it->second < 2) continue;  // already repaired
        if (++redraws > budget)
            throw sampling_error("4-cycle removal budget exhausted at position " +
                                 std::to_string(g.check_pos[static_cast<int>(key / g.n_checks)] + 1));

        const int c1 = static_cast<int>(key / g.n_checks);
        const int c2 = static_cast<int>(key % g.n_checks);
        int v1 = -1;
        for (int k = g.check_off[c1]; k < g.check_off[c1 + 1] && v1 < 0; ++k) {
            const int v = g.check_adj[k];
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
                if (g.var_adj[e] == c2) {
                    v1 = v;
                    break;
                }
        }
        if (v1 < 0) continue;

        const int u = g.check_pos[c1];
        int v2 = uniform_var_at(u);
        if (v2 == v1) {  // unlucky victim, try again
            offending.push_back(key);
            continue;
        }
        const int e1 = edge_at_position(v1, u);
        const int e2 = edge_at_position(v2, u);
        const int cv = g.var_adj[e2];
        if (cv == c1) {
            offending.push_back(key);
            continue;
        }

        drop_var_pairs(v1);
        drop_var_pairs(v2);
        const int slot1 = check_slot_of_edge(c1, e1);
        const int slot2 = check_slot_of_edge(cv, e2);
        g.var_adj[e1] = cv;
        g.var_adj[e2] = c1;
        g.check_edges[slot1] = e2;
        g.check_adj[slot1] = v2;
        g.check_edges[slot2] = e1;
        g.check_adj[slot2] = v1;
        add_var_pairs(v1, true);
        add_var_pairs(v2, true);
        if (pairs[key] >= 2) offending.push_back(key);  // more than two sharers

        if (offending.empty()) {
            // lazy stack may have dropped duplicates; do a cheap final scan
            const auto cyc = find_4cycle(g);
            if (!cyc.empty()) offending.push_back(pair_key(cyc[1], cyc[3]));
        }
    }
}

std::vector<int> find_4cycle(const TannerGraph& g) {
    // Two distinct checks shared by a pair of variables. Hash each unordered
    // check pair seen at a variable.
    std::unordered_map<long long, int> seen;
    seen.reserve(static_cast<std::size_t>(g.n_vars) * 4);
    for (int v = 0; v < g.n_vars; ++v) {
        for (int a = g.var_off[v]; a < g.var_off[v + 1]; ++a) {
            for (int b = a + 1; b < g.var_off[v + 1]; ++b) {
                int c1 = g.var_adj[a], c2 = g.var_adj[b];
                if (c1 > c2) std::swap(c1, c2);
                const long long key = static_cast<long long>(c1) * g.n_checks + c2;
                auto [it, inserted] = seen.emplace(key, v);
                if (!inserted) return {v, c1, it->second, c2};
            }
        }
    }
    return {};
}

std::vector<std::uint8_t> apply_bec(const TannerGraph& g, double eps, std::mt19937_64& rng) {
    if (eps < 0.0 || eps > 1.0) throw parameter_error("erasure probability must lie in [0, 1]");
    std::vector<std::uint8_t> erased(g.n_vars, 0);
    std::bernoulli_distribution coin(eps);
    for (int v = 0; v < g.n_vars; ++v) erased[v] = coin(rng) ? 1 : 0;
    return erased;
}

ResidualCounts residual_counts(const TannerGraph& g, const std::vector<std::uint8_t>& erased) {
    ResidualCounts rc;
    rc.V.assign(g.dim, 0);
    rc.R.assign(static_cast<std::size_t>(g.dim) * g.r, 0);
    for (int v = 0; v < g.n_vars; ++v)
        if (erased[v]) rc.V[g.var_pos[v]]++;
    for (int c = 0; c < g.n_checks; ++c) {
        int deg = 0;
        for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
            if (erased[g.check_adj[k]]) deg++;
        if (deg >= 1 && deg <= g.r) rc.R[static_cast<std::size_t>(g.check_pos[c]) * g.r + (deg - 1)] += deg;
    }
    return rc;
}

}  // namespace scldpc
