#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scldpc {

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Family { single, modified, loop, multilayer, custom };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Compact description of an SC-LDPC ensemble: a D x D binary connectivity
/// matrix T over positions, plus the (l, r) base-code degrees. T[u][v] = 1
/// means every variable node at position v sends one edge to a uniformly
/// chosen check node at position u. Positions are 0-based internally and
/// 1-based in all file formats.
struct ConnectivityMatrix {
    int dim = 0;  // D
    int l = 0;
    int r = 0;
    Family family = Family::custom;
    int L = 0;  // chain length (all families)
    int p = 0;  // modified: connection position
    int N = 1;  // multilayer: layers
    int t = 1;  // multilayer: fan-out

    std::vector<std::uint8_t> entries;  // row-major D x D, values 0/1

    bool at(int u, int v) const { return entries[static_cast<std::size_t>(u) * dim + v] != 0; }
    void set(int u, int v) { entries[static_cast<std::size_t>(u) * dim + v] = 1; }

    int row_sum(int u) const;  // d_{c,u}
    int col_sum(int v) const;  // d_{v,u}

    /// Number of chains stacked in this matrix (1 for single/modified).
    int chain_count() const;
    /// Chain index (0-based) of each position.
    std::vector<int> chain_of_position() const;
    /// Layer index (0-based) of each chain; loop chains are both layer 0.
    std::vector<int> layer_of_chain() const;
};

struct DegreeProfile {
    std::vector<int> d_v;           // per-position column sums
    std::vector<int> d_c;           // per-position row sums
    std::vector<int> check_degree;  // (r/l) * d_{c,u}
    std::vector<std::uint8_t> occupied;

    int occupied_count() const;
    int max_check_degree() const;
};

/// Exact rational, kept in lowest terms.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

using DesignRate = Rational;

/// Standard terminated chain: D = L + l - 1 positions, variables at 2..L+1
/// connecting one edge to each of positions u-1 .. u+l-2. For l = 3 this is
/// the familiar (u-1, u, u+1) spread with D = L + 2.
ConnectivityMatrix single_chain(int l, int r, int L);

/// Chain closed onto itself: six extra edge groups fill the end checks to
/// full degree and leave two groups of higher-degree variables around
/// positions p and L-p+2. Check-regular by construction. Requires l = 3.
ConnectivityMatrix modified_chain(int l, int r, int L, int p);

/// Two chains of length L connected end-to-interior in both directions.
/// Requires l = 3.
ConnectivityMatrix loop_ensemble(int l, int r, int L);

/// N stacked chains (fan-out t): the ends of each layer-(j+1) chain
/// strengthen an interior region of its parent layer-j chain. t = 1 places
/// the region at ceil(L/2); fan-out t places regions at ceil(kL/(t+1)),
/// k = 1..t. Requires l = 3.
ConnectivityMatrix multilayer(int l, int r, int L, int N, int t);

DegreeProfile degree_profile(const ConnectivityMatrix& T);

/// 1 - (l/r) * D / #occupied, exact.
DesignRate design_rate(const ConnectivityMatrix& T);

/// Fraction of strongly protected chains in an N-layer fan-out-t stack:
/// sum_{j=1}^{N-1} t^{j-1} / sum_{j=1}^{N} t^{j-1}.
Rational protection_ratio(int N, int t);

/// Positions belonging to the outer segments of a loop ensemble: chain-1
/// positions 1..ceil(L/3)+2 and the mirrored range of chain 2 (1-based
/// within each chain).
std::vector<int> loop_outer_positions(const ConnectivityMatrix& T);

/// Plain-text serialization: header "D l r family params", then D rows of
/// space-separated 0/1.
std::string serialize_matrix(const ConnectivityMatrix& T);
ConnectivityMatrix parse_matrix(const std::string& text);

void validate_matrix(const ConnectivityMatrix& T);

}  // namespace scldpc
