#pragma once

#include <vector>

#include "scldpc/evolution.hpp"

namespace scldpc {

struct ScalingParams {
    double alpha = 0.22;        // std-to-mean ratio of r1 at the critical point
    double theta = 0.59;        // covariance decay rate
    double ybar = 0.0;          // critical-phase extent
    double epsilon_star = 0.0;  // ensemble threshold
    int M = 0;
    int L = 0;
};

/// Defaults reported for the (3, 6) chain families.
constexpr double kAlphaShortChain = 0.22;  // L = 25 class
constexpr double kAlphaLongChain = 0.17;   // L = 50 class
constexpr double kThetaDefault = 0.59;

/// Standard normal tail Q(x), via the complementary error function.
double q_function(double x);

/// Single-critical-point block error estimate Q(sqrt(M) * delta_eps / alpha).
double p_block_short(double delta_eps, double M, double alpha);

struct Mu0Result {
    double value = 0.0;
    bool out_of_regime = false;   // delta_eps <= 0
    bool upper_limit_warn = false;  // sqrt(M)*delta_eps/alpha beyond 8
};

/// Average survival time of the degree-one process in the critical phase:
/// (sqrt(2 pi) / theta) * integral_0^b Phi(z) exp(z^2/2) dz with
/// b = sqrt(M) * delta_eps / alpha. Adaptive quadrature.
Mu0Result mu0(double M, double delta_eps, double alpha, double theta);

struct PBlockLongResult {
    double value = 1.0;
    bool degenerate = false;  // mu0 = 0
};

/// Steady-state block error estimate 1 - exp(-n_chains * eps * L * ybar / mu0).
PBlockLongResult p_block_long(double L, double eps, double ybar, double mu0_value, int n_chains);

struct YbarEstimate {
    double ybar = 0.0;
    double plateau_span = 0.0;
    double plateau_start = 0.0;
    double plateau_end = 0.0;
};

/// Plateau span of a steady-state trajectory divided by eps * L. A rough
/// stand-in for the density-evolution quantity; labeled an estimate.
/// Throws parameter_error on single-critical-point trajectories.
YbarEstimate estimate_ybar(const Trajectory& traj, int L, const CriticalOptions& opts = {});

struct PredictionRow {
    double eps = 0.0;
    double delta_eps = 0.0;
    double p_short = 0.0;
    double mu0 = 0.0;
    double p_long = 0.0;
};

std::vector<PredictionRow> scaling_predictions(const ScalingParams& params,
                                               const std::vector<double>& eps_grid, int n_chains = 1);

}  // namespace scldpc
