#include <doctest.h>

#include <cmath>

#include "scldpc/scaling.hpp"
#include "support/oracle.hpp"

using namespace scldpc;

TEST_CASE("Q function identities") {
    CHECK(p_block_short(0.0, 1000, 0.22) == 0.5);
    for (double x : {0.3, 1.7, 4.2}) CHECK(q_function(x) + q_function(-x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p_block_short(0.02, 1000, 1e12) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("short-chain block error example") {
    // sqrt(1000) * 0.02 / 0.22 = 2.8748, Q of it is about 2.02e-3.
    const double p = p_block_short(0.02, 1000, 0.22);
    CHECK(p == doctest::Approx(2.02e-3).epsilon(0.01));
    CHECK(p_block_short(-0.01, 1000, 0.22) > 0.5);
    CHECK_THROWS_AS(p_block_short(0.01, -5, 0.22), parameter_error);
    CHECK_THROWS_AS(p_block_short(0.01, 1000, 0.0), parameter_error);
}

TEST_CASE("p_block_short is monotone in delta and M") {
    double prev = 1.0;
    for (double d : {0.0, 0.005, 0.01, 0.02, 0.04}) {
        const double p = p_block_short(d, 1000, 0.22);
        CHECK(p <= prev + 1e-15);
        prev = p;
    }
    CHECK(p_block_short(0.02, 2000, 0.22) < p_block_short(0.02, 1000, 0.22));
}

TEST_CASE("mu0 regimes and monotonicity") {
    CHECK(mu0(1000, 0.0, 0.22, 0.59).out_of_regime);
    CHECK(mu0(1000, 0.0, 0.22, 0.59).value == 0.0);
    CHECK(mu0(1000, -0.01, 0.22, 0.59).out_of_regime);
    double prev = 0.0;
    for (double M : {500.0, 1000.0, 2000.0}) {
        const Mu0Result r = mu0(M, 0.02, 0.17, 0.59);
        CHECK_FALSE(r.out_of_regime);
        CHECK(r.value > prev);
        prev = r.value;
    }
    CHECK(mu0(1e6, 0.1, 0.17, 0.59).upper_limit_warn);
    CHECK_THROWS_AS(mu0(1000, 0.01, 0.0, 0.59), parameter_error);
}

TEST_CASE("mu0 agrees with a fine fixed-grid quadrature") {
    auto f = [](long double z) {
        const long double phi = 0.5L * std::erfc(-z / std::sqrt(2.0L));
        return phi * std::exp(0.5L * z * z);
    };
    for (double M : {500.0, 1000.0, 2000.0}) {
        for (double d : {0.01, 0.02, 0.03}) {
            const double alpha = 0.17, theta = 0.59;
            const long double b = std::sqrt((long double)M) * d / alpha;
            const long double ref =
                std::sqrt(2.0L * 3.14159265358979323846L) / theta * oracle::simpson_fine(f, 0.0L, b, 1 << 16);
            const double got = mu0(M, d, alpha, theta).value;
            CHECK(got == doctest::Approx(static_cast<double>(ref)).epsilon(5e-7));
        }
    }
}

TEST_CASE("long-chain law and the N-chain union") {
    const double mu = mu0(1000, 0.02, 0.17, 0.59).value;
    const double eps = 0.468, ybar = 0.3, L = 50;

    const double p1 = p_block_long(L, eps, ybar, mu, 1).value;
    const double p2 = p_block_long(L, eps, ybar, mu, 2).value;
    // Two independent chains, written out directly.
    const double direct = -std::expm1(-2.0 * eps * L * ybar / mu);
    CHECK(p2 == direct);  // bit-for-bit
    CHECK(p2 > p1);

    CHECK(p_block_long(L, eps, ybar, 1e308, 1).value == doctest::Approx(0.0).epsilon(1e-12));
    const PBlockLongResult degen = p_block_long(L, eps, ybar, 0.0, 1);
    CHECK(degen.degenerate);
    CHECK(degen.value == 1.0);

    // Convexity bound 1 - e^-x <= x.
    for (int n : {1, 2, 5}) {
        const double x = n * eps * L * ybar / mu;
        CHECK(p_block_long(L, eps, ybar, mu, n).value <= x + 1e-15);
    }
}

TEST_CASE("ybar estimate needs a plateau") {
    const Trajectory short_traj = integrate(single_chain(3, 6, 25), 0.45);
    CHECK_THROWS_AS(estimate_ybar(short_traj, 25), parameter_error);

    const Trajectory long_traj = integrate(single_chain(3, 6, 50), 0.45);
    const YbarEstimate est = estimate_ybar(long_traj, 50);
    CHECK(est.ybar > 0.0);
    CHECK(est.plateau_span == doctest::Approx(est.plateau_end - est.plateau_start));
    CHECK(est.ybar == doctest::Approx(est.plateau_span / (0.45 * 50)));
}

TEST_CASE("prediction rows stay inside [0,1]") {
    ScalingParams params;
    params.alpha = 0.17;
    params.theta = 0.59;
    params.ybar = 0.3;
    params.epsilon_star = 0.488;
    params.M = 1000;
    params.L = 50;
    const auto rows = scaling_predictions(params, {0.44, 0.46, 0.47, 0.475}, 1);
    REQUIRE(rows.size() == 4);
    double prev_long = 0.0;
    for (const auto& r : rows) {
        CHECK(r.p_short >= 0.0);
        CHECK(r.p_short <= 1.0);
        CHECK(r.p_long >= 0.0);
        CHECK(r.p_long <= 1.0);
        CHECK(r.p_long >= prev_long - 1e-12);  // decreasing delta -> growing risk
        prev_long = r.p_long;
    }
}
