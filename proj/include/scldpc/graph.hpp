#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scldpc/ensemble.hpp"

namespace scldpc {

struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sampled code instance: M variables per occupied position, (l/r)M checks
/// per position, edges drawn by uniform socket matching per column of T.
/// Edge e is the e-th entry of the variable-side adjacency; check-side lists
/// index into the same edge ids.
struct TannerGraph {
    int M = 0;
    int l = 0;
    int r = 0;
    int dim = 0;
    int n_vars = 0;
    int n_checks = 0;

    std::vector<int> var_pos;    // position of each variable
    std::vector<int> check_pos;  // position of each check
    std::vector<int> var_off;    // n_vars + 1 offsets into var_adj
    std::vector<int> var_adj;    // check id per edge
    std::vector<int> check_off;  // n_checks + 1 offsets into check_edges
    std::vector<int> check_edges;  // edge ids grouped by check
    std::vector<int> check_adj;    // var id per entry of check_edges
    std::vector<int> var_chain;    // chain index of each variable

    int edge_count() const { return static_cast<int>(var_adj.size()); }
    int var_degree(int v) const { return var_off[v + 1] - var_off[v]; }
    int check_degree_full(int c) const { return check_off[c + 1] - check_off[c]; }

    /// Variables of one position, laid out contiguously.
    int first_var_of_position(int u) const { return pos_var_off[u]; }
    int vars_at_position(int u) const { return pos_var_off[u + 1] - pos_var_off[u]; }
    std::vector<int> pos_var_off;  // dim + 1

    int chain_count = 1;
};

/// Configuration-model sample of T with M variables per occupied position.
/// With avoid_4cycles set, edges of detected 4-cycles are re-drawn by random
/// same-position socket swaps until the graph is 4-cycle free.
TannerGraph sample_graph(const ConnectivityMatrix& T, int M, std::mt19937_64& rng,
                         bool avoid_4cycles = false);

inline TannerGraph sample_graph(const ConnectivityMatrix& T, int M, std::uint64_t seed,
                                bool avoid_4cycles = false) {
    std::mt19937_64 rng(seed);
    return sample_graph(T, M, rng, avoid_4cycles);
}

/// BEC reduction: each variable stays (erased) independently with
/// probability eps; the residual graph is implied by the erasure mask.
std::vector<std::uint8_t> apply_bec(const TannerGraph& g, double eps, std::mt19937_64& rng);

/// In-place 4-cycle expurgation by same-position socket swaps.
void remove_4cycles(TannerGraph& g, std::mt19937_64& rng);

/// Exhaustive 4-cycle search (pairs of variables sharing two checks).
/// Returns one witness cycle as {v1, c1, v2, c2}, or empty if none.
std::vector<int> find_4cycle(const TannerGraph& g);

/// Per-position counts of the residual graph: surviving variables V_u and
/// edges R_{j,u} grouped by residual check degree j.
struct ResidualCounts {
    std::vector<long long> V;  // dim
    std::vector<long long> R;  // dim x r, R[u*r + (j-1)]
};
ResidualCounts residual_counts(const TannerGraph& g, const std::vector<std::uint8_t>& erased);

}  // namespace scldpc
