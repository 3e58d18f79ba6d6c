#include "scldpc/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace scldpc {

const char* family_name(Family f) {
    switch (f) {
        case Family::single: return "single";
        case Family::modified: return "modified";
        case Family::loop: return "loop";
        case Family::multilayer: return "multilayer";
        case Family::custom: return "custom";
    }
    return "custom";
}

Family family_from_name(const std::string& name) {
    if (name == "single") return Family::single;
    if (name == "modified") return Family::modified;
    if (name == "loop") return Family::loop;
    if (name == "multilayer") return Family::multilayer;
    if (name == "custom") return Family::custom;
    throw parameter_error("unknown ensemble family: " + name);
}

int ConnectivityMatrix::row_sum(int u) const {
    int s = 0;
    for (int v = 0; v < dim; ++v) s += at(u, v) ? 1 : 0;
    return s;
}

int ConnectivityMatrix::col_sum(int v) const {
    int s = 0;
    for (int u = 0; u < dim; ++u) s += at(u, v) ? 1 : 0;
    return s;
}

int ConnectivityMatrix::chain_count() const {
    switch (family) {
        case Family::loop: return 2;
        case Family::multilayer: {
            int total = 0, layer = 1;
            for (int j = 0; j < N; ++j) {
                total += layer;
                layer *= t;
            }
            return total;
        }
        default: return 1;
    }
}

std::vector<int> ConnectivityMatrix::chain_of_position() const {
    std::vector<int> chain(dim, 0);
    const int chains = chain_count();
    if (chains > 1) {
        const int block = dim / chains;
        for (int u = 0; u < dim; ++u) chain[u] = u / block;
    }
    return chain;
}

std::vector<int> ConnectivityMatrix::layer_of_chain() const {
    std::vector<int> layer;
    if (family == Family::multilayer) {
        int width = 1;
        for (int j = 0; j < N; ++j) {
            for (int c = 0; c < width; ++c) layer.push_back(j);
            width *= t;
        }
    } else {
        layer.assign(static_cast<std::size_t>(chain_count()), 0);
    }
    return layer;
}

int DegreeProfile::occupied_count() const {
    int n = 0;
    for (auto o : occupied) n += o ? 1 : 0;
    return n;
}

int DegreeProfile::max_check_degree() const {
    return check_degree.empty() ? 0 : *std::max_element(check_degree.begin(), check_degree.end());
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw parameter_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

namespace {

void check_base_pair(int l, int r) {
    if (l < 2) throw parameter_error("variable degree l must be >= 2");
    if (r <= 0 || r % l != 0) throw parameter_error("check degree r must be a positive multiple of l");
}

ConnectivityMatrix blank(int l, int r, int D) {
    ConnectivityMatrix T;
    T.dim = D;
    T.l = l;
    T.r = r;
    T.entries.assign(static_cast<std::size_t>(D) * D, 0);
    return T;
}

// Writes a single-chain block into T at (row0, col0).
void fill_single_block(ConnectivityMatrix& T, int l, int L, int row0, int col0) {
    for (int v = 2; v <= L + 1; ++v)
        for (int u = v - 1; u <= v + l - 2; ++u) T.set(row0 + u - 1, col0 + v - 1);
}

// The six ones coupling the ends of a child chain to an interior region of
// its parent chain, anchored at parent position a (1-based).
void fill_cct_block(ConnectivityMatrix& T, int L, int child_row0, int parent_col0, int a) {
    T.set(child_row0 + 0, parent_col0 + a - 1);
    T.set(child_row0 + 0, parent_col0 + a);
    T.set(child_row0 + 1, parent_col0 + a + 1);
    T.set(child_row0 + L, parent_col0 + a);
    T.set(child_row0 + L + 1, parent_col0 + a + 1);
    T.set(child_row0 + L + 1, parent_col0 + a + 2);
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

ConnectivityMatrix single_chain(int l, int r, int L) {
    check_base_pair(l, r);
    if (L < 2) throw parameter_error("single chain needs L >= 2");
    ConnectivityMatrix T = blank(l, r, L + l - 1);
    T.family = Family::single;
    T.L = L;
    fill_single_block(T, l, L, 0, 0);
    return T;
}

ConnectivityMatrix modified_chain(int l, int r, int L, int p) {
    check_base_pair(l, r);
    if (l != 3) throw parameter_error("modified chain is defined for l = 3");
    if (L < 4) throw parameter_error("modified chain needs L >= 4");
    if (p < 2 || p > ceil_div(L, 2)) throw parameter_error("modified chain needs p in {2, .., ceil(L/2)}");
    ConnectivityMatrix T = single_chain(l, r, L);
    T.family = Family::modified;
    T.p = p;
    // Close the right end: variables at p, p+1 -> check L+2; p+2 -> check L+1.
    T.set(L + 1, p - 1);
    T.set(L + 1, p);
    T.set(L, p + 1);
    // Mirror on the left: variables at L-p+3, L-p+2 -> check 1; L-p+1 -> check 2.
    T.set(0, L - p + 2);
    T.set(0, L - p + 1);
    T.set(1, L - p);
    return T;
}

ConnectivityMatrix loop_ensemble(int l, int r, int L) {
    check_base_pair(l, r);
    if (l != 3) throw parameter_error("loop ensemble is defined for l = 3");
    if (L < 5) throw parameter_error("loop ensemble needs L >= 5");
    const int a = ceil_div(L, 3);       // first L1 column
    const int b = (2 * L) / 3 + 1;      // first L2 column
    if (a < 2 || b + 2 > L + 1) throw parameter_error("loop connection region outside the chain");
    if (a + 2 >= b) throw parameter_error("loop connection regions overlap for this L");
    const int B = L + 2;
    ConnectivityMatrix T = blank(l, r, 2 * B);
    T.family = Family::loop;
    T.L = L;
    fill_single_block(T, l, L, 0, 0);
    fill_single_block(T, l, L, B, B);
    // L1: chain-1 variables into chain-2 end checks.
    T.set(B + 0, a - 1);
    T.set(B + 0, a);
    T.set(B + 1, a + 1);
    // L2: chain-2 variables into chain-1 end checks.
    T.set(L, B + b - 1);
    T.set(L + 1, B + b);
    T.set(L + 1, B + b + 1);
    return T;
}

ConnectivityMatrix multilayer(int l, int r, int L, int N, int t) {
    check_base_pair(l, r);
    if (l != 3) throw parameter_error("multilayer ensemble is defined for l = 3");
    if (N < 1) throw parameter_error("multilayer needs N >= 1");
    if (t < 1) throw parameter_error("multilayer needs t >= 1");
    if (L < 2) throw parameter_error("multilayer needs L >= 2");

    std::vector<int> anchors(t);
    for (int k = 1; k <= t; ++k) anchors[k - 1] = ceil_div(k * L, t + 1);
    if (N > 1) {
        for (int k = 0; k < t; ++k) {
            if (anchors[k] < 4 || anchors[k] + 3 > L - 1)
                throw parameter_error("multilayer connection region does not fit inside the chain");
            if (k > 0 && anchors[k] < anchors[k - 1] + 4)
                throw parameter_error("multilayer connection regions overlap");
        }
    }

    const int B = L + 2;
    std::vector<int> layer_first;  // block index of the first chain per layer
    int total = 0, width = 1;
    for (int j = 0; j < N; ++j) {
        layer_first.push_back(total);
        total += width;
        width *= t;
    }

    ConnectivityMatrix T = blank(l, r, total * B);
    T.family = Family::multilayer;
    T.L = L;
    T.N = N;
    T.t = t;
    for (int c = 0; c < total; ++c) fill_single_block(T, l, L, c * B, c * B);

    width = 1;
    for (int j = 0; j + 1 < N; ++j) {
        for (int c = 0; c < width; ++c) {
            const int parent = layer_first[j] + c;
            for (int k = 0; k < t; ++k) {
                const int child = layer_first[j + 1] + c * t + k;
                fill_cct_block(T, L, child * B, parent * B, anchors[k]);
            }
        }
        width *= t;
    }
    return T;
}

DegreeProfile degree_profile(const ConnectivityMatrix& T) {
    DegreeProfile dp;
    dp.d_v.resize(T.dim);
    dp.d_c.resize(T.dim);
    dp.check_degree.resize(T.dim);
    dp.occupied.resize(T.dim);
    for (int u = 0; u < T.dim; ++u) {
        dp.d_c[u] = T.row_sum(u);
        dp.d_v[u] = T.col_sum(u);
        dp.check_degree[u] = (T.r / T.l) * dp.d_c[u];
        dp.occupied[u] = dp.d_v[u] > 0 ? 1 : 0;
    }
    return dp;
}

DesignRate design_rate(const ConnectivityMatrix& T) {
    const DegreeProfile dp = degree_profile(T);
    const long long occ = dp.occupied_count();
    if (occ == 0) throw parameter_error("design rate undefined: no occupied positions");
    // 1 - (l/r) * D / occ = (r*occ - l*D) / (r*occ)
    return Rational(static_cast<long long>(T.r) * occ - static_cast<long long>(T.l) * T.dim,
                    static_cast<long long>(T.r) * occ);
}

Rational protection_ratio(int N, int t) {
    if (N < 1 || t < 1) throw parameter_error("protection ratio needs N >= 1 and t >= 1");
    long long upper = 0, total = 0, term = 1;
    for (int j = 1; j <= N; ++j) {
        if (j < N) upper += term;
        total += term;
        term *= t;
    }
    return Rational(upper, total);
}

std::vector<int> loop_outer_positions(const ConnectivityMatrix& T) {
    if (T.family != Family::loop) throw parameter_error("outer segments are defined for the loop family");
    const int L = T.L;
    const int B = L + 2;
    const int a = ceil_div(L, 3);
    std::vector<int> pos;
    for (int u = 1; u <= a + 2; ++u) pos.push_back(u - 1);              // chain 1, left outer
    for (int u = L + 1 - a; u <= L + 2; ++u) pos.push_back(B + u - 1);  // chain 2, mirrored
    return pos;
}

std::string serialize_matrix(const ConnectivityMatrix& T) {
    std::ostringstream out;
    out << T.dim << ' ' << T.l << ' ' << T.r << ' ' << family_name(T.family);
    switch (T.family) {
        case Family::single: out << ' ' << T.L; break;
        case Family::modified: out << ' ' << T.L << ' ' << T.p; break;
        case Family::loop: out << ' ' << T.L; break;
        case Family::multilayer: out << ' ' << T.L << ' ' << T.N << ' ' << T.t; break;
        case Family::custom: break;
    }
    out << '\n';
    for (int u = 0; u < T.dim; ++u) {
        for (int v = 0; v < T.dim; ++v) {
            if (v) out << ' ';
            out << (T.at(u, v) ? '1' : '0');
        }
        out << '\n';
    }
    return out.str();
}

ConnectivityMatrix parse_matrix(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw parameter_error("empty matrix file");
    std::istringstream hs(header);
    int D = 0, l = 0, r = 0;
    std::string fam;
    if (!(hs >> D >> l >> r >> fam)) throw parameter_error("bad matrix header, expected 'D l r family params'");
    ConnectivityMatrix T = blank(l, r, D);
    T.family = family_from_name(fam);
    switch (T.family) {
        case Family::single:
        case Family::loop:
            if (!(hs >> T.L)) throw parameter_error("matrix header missing L");
            break;
        case Family::modified:
            if (!(hs >> T.L >> T.p)) throw parameter_error("matrix header missing L p");
            break;
        case Family::multilayer:
            if (!(hs >> T.L >> T.N >> T.t)) throw parameter_error("matrix header missing L N t");
            break;
        case Family::custom: break;
    }
    for (int u = 0; u < D; ++u) {
        for (int v = 0; v < D; ++v) {
            int x = -1;
            if (!(in >> x)) throw parameter_error("matrix body truncated");
            if (x != 0 && x != 1) throw parameter_error("matrix entries must be 0 or 1");
            if (x) T.set(u, v);
        }
    }
    validate_matrix(T);
    return T;
}

void validate_matrix(const ConnectivityMatrix& T) {
    if (T.dim <= 0) throw parameter_error("matrix dimension must be positive");
    if (T.l < 2 || T.r <= 0 || T.r % T.l != 0) throw parameter_error("invalid (l, r) base pair");
    for (int u = 0; u < T.dim; ++u) {
        const int dc = T.row_sum(u);
        if ((T.r / T.l) * dc > T.r)
            throw parameter_error("check degree cap exceeded at position " + std::to_string(u + 1));
    }
}

}  // namespace scldpc
