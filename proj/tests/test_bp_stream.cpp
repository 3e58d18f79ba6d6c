#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "scldpc/bp.hpp"
#include "scldpc/peeling.hpp"
#include "scldpc/rng.hpp"
#include "scldpc/stream.hpp"
#include "support/oracle.hpp"

using namespace scldpc;

namespace {

BPConfig fixpoint_cfg() {
    BPConfig cfg;
    cfg.max_iterations = 1 << 20;
    return cfg;
}

ConnectivityMatrix pick_family(std::mt19937& gen) {
    switch (gen() % 4) {
        case 0: return single_chain(3, 6, 6 + static_cast<int>(gen() % 10));
        case 1: return modified_chain(3, 6, 12, 2 + static_cast<int>(gen() % 5));
        case 2: return loop_ensemble(3, 6, 8 + static_cast<int>(gen() % 8));
        default: return multilayer(3, 6, 10, 1 + static_cast<int>(gen() % 3), 1);
    }
}

// Hand-built 7-variable path of three checks; cycle-free.
TannerGraph tree_graph() {
    TannerGraph g;
    g.M = 7;
    g.l = 1;
    g.r = 3;
    g.dim = 1;
    g.n_vars = 7;
    g.n_checks = 3;
    g.var_pos.assign(7, 0);
    g.check_pos.assign(3, 0);
    g.var_chain.assign(7, 0);
    g.chain_count = 1;
    g.pos_var_off = {0, 7};
    const std::vector<std::vector<int>> checks = {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}};
    g.var_off.assign(8, 0);
    for (const auto& c : checks)
        for (int v : c) g.var_off[v + 1]++;
    for (int v = 0; v < 7; ++v) g.var_off[v + 1] += g.var_off[v];
    g.var_adj.assign(g.var_off[7], -1);
    std::vector<int> cursor(g.var_off.begin(), g.var_off.end() - 1);
    for (int c = 0; c < 3; ++c)
        for (int v : checks[c]) g.var_adj[cursor[v]++] = c;
    // check-side mirrors
    g.check_off = {0, 3, 6, 9};
    g.check_edges.assign(9, -1);
    g.check_adj.assign(9, -1);
    int slot = 0;
    for (int c = 0; c < 3; ++c)
        for (int v = 0; v < 7; ++v)
            for (int e = g.var_off[v]; e < g.var_off[v + 1]; ++e)
                if (g.var_adj[e] == c) {
                    g.check_edges[slot] = e;
                    g.check_adj[slot] = v;
                    ++slot;
                }
    return g;
}

}  // namespace

TEST_CASE("BEC BP equals peeling on random graphs and erasures") {
    std::mt19937 gen(17);
    PeelScratch scratch;
    const BPConfig cfg = fixpoint_cfg();
    int failures_seen = 0;
    for (int i = 0; i < 300; ++i) {
        const ConnectivityMatrix T = pick_family(gen);
        std::mt19937_64 rng(splitmix64(i));
        TannerGraph g = sample_graph(T, 24, rng);
        const double eps = 0.2 + 0.7 * (gen() % 100) / 100.0;
        auto erased = apply_bec(g, eps, rng);
        const PDOutcome pd = peel(g, erased, rng, &scratch);
        const BecBPOutcome bp = bp_decode_bec(g, erased, cfg);
        REQUIRE(pd.success == bp.success);
        if (!pd.success) {
            ++failures_seen;
            long long pd_residual = 0;
            for (int x : pd.residual_positions) pd_residual += x;
            CHECK(pd_residual == bp.residual_erasures);
        }
    }
    CHECK(failures_seen > 0);
}

TEST_CASE("BEC BP with nothing erased returns immediately") {
    TannerGraph g = sample_graph(single_chain(3, 6, 6), 24, 1);
    std::vector<std::uint8_t> erased(g.n_vars, 0);
    const BecBPOutcome out = bp_decode_bec(g, erased, fixpoint_cfg());
    CHECK(out.success);
    CHECK(out.iterations == 0);
}

TEST_CASE("paired-seed BLER equality of peeling and BEC BP campaigns") {
    const ConnectivityMatrix T = single_chain(3, 6, 10);
    TrialOptions opts;
    opts.threads = 2;
    const std::vector<double> grid = {0.42, 0.47};
    const BlerTable pd = run_trials(T, 64, grid, 400, 31337, opts);
    const BlerTable bp = bec_bp_trials(T, 64, grid, 400, 31337, fixpoint_cfg(), opts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(pd.rows[i].failures == bp.rows[i].failures);
        CHECK(pd.rows[i].chain_failures == bp.rows[i].chain_failures);
    }
}

TEST_CASE("AWGN decoder on saturated and noiseless inputs") {
    TannerGraph g = sample_graph(single_chain(3, 6, 6), 24, 2);
    BPConfig cfg;

    SUBCASE("clip-valued LLRs decide all-zero in one iteration") {
        std::vector<double> llr(g.n_vars, cfg.llr_clip);
        const AwgnBPOutcome out = bp_decode_biawgn(g, llr, cfg);
        CHECK(out.syndrome_ok);
        CHECK(out.iterations == 1);
        for (auto h : out.hard) CHECK(h == 0);
    }
    SUBCASE("noiseless BPSK all-zero codeword") {
        const double sigma2 = 0.5;
        std::vector<double> llr(g.n_vars, 2.0 * 1.0 / sigma2);
        const AwgnBPOutcome out = bp_decode_biawgn(g, llr, cfg);
        CHECK(out.syndrome_ok);
        for (auto h : out.hard) CHECK(h == 0);
    }
}

TEST_CASE("sum-product matches exact marginals on a tree") {
    TannerGraph g = tree_graph();
    std::mt19937_64 rng(404);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> llr(g.n_vars);
    for (auto& x : llr) x = 1.5 + noise(rng);  // mildly biased toward zero bits
    llr[3] = -2.0;                             // one strongly flipped variable

    BPConfig cfg;
    cfg.early_stop = false;
    cfg.max_iterations = 30;
    cfg.llr_clip = 100.0;
    const AwgnBPOutcome out = bp_decode_biawgn(g, llr, cfg);
    const std::vector<double> exact = oracle::map_marginals(g, llr);
    for (int v = 0; v < g.n_vars; ++v) CHECK(out.app[v] == doctest::Approx(exact[v]).epsilon(1e-6));
}

TEST_CASE("transmission schedule for two layers matches the displayed order") {
    const ConnectivityMatrix T = multilayer(3, 6, 50, 2, 1);
    const TransmissionSchedule s = transmission_schedule(T);
    const int m = 25;  // ceil(50/2)
    std::vector<SubBlock> want;
    for (int i = 2; i <= m + 3; ++i) want.push_back({1, i});
    want.push_back({2, 2});
    want.push_back({2, 51});
    for (int i = m + 4; i <= 51; ++i) want.push_back({1, i});
    for (int i = 3; i <= 50; ++i) want.push_back({2, i});
    REQUIRE(s.order.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(s.order[i].chain == want[i].chain);
        CHECK(s.order[i].position == want[i].position);
    }
}

TEST_CASE("transmission schedule is a permutation of occupied sub-blocks") {
    for (int N : {1, 2, 3, 4}) {
        const ConnectivityMatrix T = multilayer(3, 6, 20, N, 1);
        const TransmissionSchedule s = transmission_schedule(T);
        CHECK(static_cast<int>(s.order.size()) == N * 20);
        std::set<std::pair<int, int>> seen;
        for (const auto& b : s.order) {
            CHECK(b.position >= 2);
            CHECK(b.position <= 21);
            CHECK(seen.insert({b.chain, b.position}).second);
        }
    }
    // Fan-out 2: layer-2 chains hoist their boundaries into distinct regions.
    const ConnectivityMatrix T2 = multilayer(3, 6, 100, 2, 2);
    const TransmissionSchedule s2 = transmission_schedule(T2);
    CHECK(static_cast<int>(s2.order.size()) == 3 * 100);
    std::set<std::pair<int, int>> seen;
    for (const auto& b : s2.order) CHECK(seen.insert({b.chain, b.position}).second);
}

TEST_CASE("N=1 schedule is the natural order") {
    const ConnectivityMatrix T = multilayer(3, 6, 12, 1, 1);
    const TransmissionSchedule s = transmission_schedule(T);
    REQUIRE(s.order.size() == 12);
    for (int i = 0; i < 12; ++i) {
        CHECK(s.order[i].chain == 1);
        CHECK(s.order[i].position == i + 2);
    }
    CHECK_THROWS_AS(transmission_schedule(single_chain(3, 6, 12)), parameter_error);
}

TEST_CASE("chain-2 boundary blocks precede the second half of chain 1") {
    const ConnectivityMatrix T = multilayer(3, 6, 50, 2, 1);
    const TransmissionSchedule s = transmission_schedule(T);
    auto index_of = [&](int chain, int pos) {
        for (std::size_t i = 0; i < s.order.size(); ++i)
            if (s.order[i].chain == chain && s.order[i].position == pos) return static_cast<int>(i);
        return -1;
    };
    CHECK(index_of(2, 2) < index_of(1, 29));      // ceil(L/2)+4 = 29
    CHECK(index_of(2, 51) < index_of(1, 29));
    CHECK(index_of(2, 2) > index_of(1, 28));      // after ceil(L/2)+3
}

TEST_CASE("window decoding equals full BP when W covers the graph") {
    const ConnectivityMatrix T = single_chain(3, 6, 20);
    const TransmissionSchedule sched = natural_schedule(T);
    const BPConfig cfg = fixpoint_cfg();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::mt19937_64 rng = trial_engine(7, 0, seed);
        TannerGraph g = sample_graph(T, 60, rng);
        const auto erased = apply_bec(g, 0.47, rng);
        const BecBPOutcome full = bp_decode_bec(g, erased, cfg);
        const WindowBecOutcome win = window_decode_bec(g, T, erased, sched, T.dim, cfg);
        CHECK(full.success == win.success);
        CHECK(full.recovered == win.recovered);
    }
}

TEST_CASE("window success implies full-decode success") {
    const ConnectivityMatrix T = single_chain(3, 6, 20);
    const TransmissionSchedule sched = natural_schedule(T);
    const BPConfig cfg = fixpoint_cfg();
    int window_failures = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        std::mt19937_64 rng = trial_engine(8, 0, seed);
        TannerGraph g = sample_graph(T, 60, rng);
        const auto erased = apply_bec(g, 0.46, rng);
        const WindowBecOutcome win = window_decode_bec(g, T, erased, sched, 5, cfg);
        if (win.success) {
            const BecBPOutcome full = bp_decode_bec(g, erased, cfg);
            CHECK(full.success);
        } else {
            ++window_failures;
        }
    }
    CHECK(window_failures > 0);  // the narrow window does lose to the full decoder sometimes
}

TEST_CASE("window decoding rejects bad widths and foreign schedules") {
    const ConnectivityMatrix T = multilayer(3, 6, 10, 2, 1);
    TannerGraph g = sample_graph(T, 24, 3);
    std::vector<std::uint8_t> erased(g.n_vars, 0);
    const BPConfig cfg;
    TransmissionSchedule sched = transmission_schedule(T);
    CHECK_THROWS_AS(window_decode_bec(g, T, erased, sched, 3, cfg), parameter_error);
    std::swap(sched.order[0], sched.order[1]);
    CHECK_THROWS_AS(window_decode_bec(g, T, erased, sched, 12, cfg), stream_order_error);
}

TEST_CASE("multilayer window uses hoisted boundary data") {
    // With the canonical schedule the connected stack decodes through the
    // strengthened middle; the run must complete and commit every position.
    const ConnectivityMatrix T = multilayer(3, 6, 12, 2, 1);
    const TransmissionSchedule sched = transmission_schedule(T);
    const BPConfig cfg = fixpoint_cfg();
    std::mt19937_64 rng(99);
    TannerGraph g = sample_graph(T, 48, rng);
    const auto erased = apply_bec(g, 0.40, rng);
    const WindowBecOutcome win = window_decode_bec(g, T, erased, sched, 6, cfg);
    const BecBPOutcome full = bp_decode_bec(g, erased, cfg);
    CHECK(win.windows >= 1);
    if (win.success) CHECK(full.success);
}

TEST_CASE("window AWGN equals full sum-product when W covers the graph") {
    const ConnectivityMatrix T = single_chain(3, 6, 10);
    const TransmissionSchedule sched = natural_schedule(T);
    BPConfig cfg;
    cfg.max_iterations = 50;
    cfg.early_stop = false;
    std::mt19937_64 rng(1234);
    TannerGraph g = sample_graph(T, 24, rng);
    std::vector<double> llr(g.n_vars);
    std::normal_distribution<double> noise(0.0, 0.9);
    const double sigma2 = 0.81;
    for (auto& x : llr) x = 2.0 * (1.0 + noise(rng)) / sigma2;
    const AwgnBPOutcome full = bp_decode_biawgn(g, llr, cfg);
    const WindowAwgnOutcome win = window_decode_biawgn(g, T, llr, sched, T.dim, cfg);
    CHECK(win.hard == full.hard);
}
