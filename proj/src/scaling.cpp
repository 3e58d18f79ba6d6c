#include "scldpc/scaling.hpp"

#include <cmath>
#include <numbers>

namespace scldpc {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double p_block_short(double delta_eps, double M, double alpha) {
    if (M <= 0.0) throw parameter_error("p_block_short needs M > 0");
    if (alpha <= 0.0) throw parameter_error("p_block_short needs alpha > 0");
    return q_function(std::sqrt(M) * delta_eps / alpha);
}

namespace {

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mu0_integrand(double z) { return phi_cdf(z) * std::exp(0.5 * z * z); }

// Adaptive Simpson with interval bisection; the integrand is smooth but
// grows like exp(z^2/2), so refinement concentrates near the upper limit.
double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = mu0_integrand(lm), frm = mu0_integrand(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

Mu0Result mu0(double M, double delta_eps, double alpha, double theta) {
    if (alpha <= 0.0 || theta <= 0.0) throw parameter_error("mu0 needs alpha > 0 and theta > 0");
    Mu0Result res;
    if (delta_eps <= 0.0) {
        res.out_of_regime = true;
        res.value = 0.0;
        return res;
    }
    double b = std::sqrt(M) * delta_eps / alpha;
    if (b > 8.0) res.upper_limit_warn = true;
    if (b > 30.0) b = 30.0;  // exp(z^2/2) would overflow any practical scale far earlier
    const double fa = mu0_integrand(0.0), fb = mu0_integrand(b), fm = mu0_integrand(0.5 * b);
    const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = 1e-12 * std::max(1.0, std::abs(whole));
    const double integral = adaptive_simpson(0.0, b, fa, fm, fb, whole, tol, 30);
    res.value = std::sqrt(2.0 * std::numbers::pi) / theta * integral;
    return res;
}

PBlockLongResult p_block_long(double L, double eps, double ybar, double mu0_value, int n_chains) {
    if (n_chains < 1) throw parameter_error("p_block_long needs n_chains >= 1");
    PBlockLongResult res;
    if (mu0_value <= 0.0) {
        res.degenerate = true;
        res.value = 1.0;
        return res;
    }
    res.value = -std::expm1(-static_cast<double>(n_chains) * eps * L * ybar / mu0_value);
    res.degenerate = false;
    return res;
}

YbarEstimate estimate_ybar(const Trajectory& traj, int L, const CriticalOptions& opts) {
    const CriticalReport rep = critical_report(traj, opts);
    if (rep.regime != Regime::steady_state_phase)
        throw parameter_error("ybar estimate needs a steady-state-phase trajectory");
    YbarEstimate est;
    est.plateau_start = rep.plateau_start;
    est.plateau_end = rep.plateau_end;
    est.plateau_span = rep.plateau_end - rep.plateau_start;
    est.ybar = est.plateau_span / (traj.epsilon * L);
    return est;
}

std::vector<PredictionRow> scaling_predictions(const ScalingParams& params,
                                               const std::vector<double>& eps_grid, int n_chains) {
    std::vector<PredictionRow> rows;
    for (double eps : eps_grid) {
        PredictionRow row;
        row.eps = eps;
        row.delta_eps = params.epsilon_star - eps;
        row.p_short = p_block_short(row.delta_eps, params.M, params.alpha);
        const Mu0Result m = mu0(params.M, row.delta_eps, params.alpha, params.theta);
        row.mu0 = m.value;
        row.p_long = p_block_long(params.L, eps, params.ybar, m.value, n_chains).value;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace scldpc
