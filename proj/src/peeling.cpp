#include "scldpc/peeling.hpp"

#include <cassert>

namespace scldpc {

PDOutcome peel(const TannerGraph& g, const std::vector<std::uint8_t>& erased, std::mt19937_64& rng,
               PeelScratch* scratch, bool record_trace) {
    PeelScratch local;
    PeelScratch& ws = scratch ? *scratch : local;

    ws.check_deg.assign(g.n_checks, 0);
    ws.var_alive.assign(erased.begin(), erased.end());
    ws.deg1.clear();
    ws.deg1_slot.assign(g.n_checks, -1);

    long alive = 0;
    for (int v = 0; v < g.n_vars; ++v)
        if (ws.var_alive[v]) ++alive;

    for (int c = 0; c < g.n_checks; ++c) {
        int d = 0;
        for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
            if (ws.var_alive[g.check_adj[k]]) ++d;
        ws.check_deg[c] = d;
        if (d == 1) {
            ws.deg1_slot[c] = static_cast<int>(ws.deg1.size());
            ws.deg1.push_back(c);
        }
    }

    auto set_remove = [&](int c) {
        const int slot = ws.deg1_slot[c];
        const int last = ws.deg1.back();
        ws.deg1[slot] = last;
        ws.deg1_slot[last] = slot;
        ws.deg1.pop_back();
        ws.deg1_slot[c] = -1;
    };
    auto set_insert = [&](int c) {
        ws.deg1_slot[c] = static_cast<int>(ws.deg1.size());
        ws.deg1.push_back(c);
    };

    PDOutcome out;
    if (record_trace) out.r1_trace.push_back(static_cast<int>(ws.deg1.size()));

    while (!ws.deg1.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, ws.deg1.size() - 1);
        const int c = ws.deg1[pick(rng)];

        int victim = -1;
        for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
            if (ws.var_alive[g.check_adj[k]]) {
                victim = g.check_adj[k];
                break;
            }

        ws.var_alive[victim] = 0;
        --alive;
        ++out.iterations;
        for (int e = g.var_off[victim]; e < g.var_off[victim + 1]; ++e) {
            const int cn = g.var_adj[e];
            const int d = --ws.check_deg[cn];
            if (d == 1) {
                set_insert(cn);
            } else if (d == 0 && ws.deg1_slot[cn] >= 0) {
                set_remove(cn);
            }
        }
        if (record_trace) out.r1_trace.push_back(static_cast<int>(ws.deg1.size()));

#ifndef NDEBUG
        // Debug builds cross-check the incremental set against a recount.
        if (g.n_vars <= 2048) {
            int recount = 0;
            for (int c = 0; c < g.n_checks; ++c) {
                int d = 0;
                for (int k = g.check_off[c]; k < g.check_off[c + 1]; ++k)
                    if (ws.var_alive[g.check_adj[k]]) ++d;
                if (d == 1) ++recount;
            }
            assert(recount == static_cast<int>(ws.deg1.size()));
        }
#endif
    }

    out.success = alive == 0;
    if (!out.success) {
        out.residual_positions.assign(g.dim, 0);
        out.chain_failed.assign(g.chain_count, 0);
        for (int v = 0; v < g.n_vars; ++v)
            if (ws.var_alive[v]) {
                out.residual_positions[g.var_pos[v]]++;
                out.chain_failed[g.var_chain[v]] = 1;
            }
    }
    return out;
}

}  // namespace scldpc
