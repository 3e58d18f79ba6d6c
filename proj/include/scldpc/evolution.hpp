#pragma once

#include <vector>

#include "scldpc/ensemble.hpp"

namespace scldpc {

struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Normalized degree distribution of the residual graph at normalized time
/// tau: v[u] counts variables, r[u*rmax + j-1] counts edges whose check
/// endpoint has degree j, both per position and per unit eps*M.
struct DDState {
    double tau = 0.0;
    int dim = 0;
    int rmax = 0;
    std::vector<double> v;
    std::vector<double> r;

    double rj(int u, int j) const { return r[static_cast<std::size_t>(u) * rmax + (j - 1)]; }
    double& rj(int u, int j) { return r[static_cast<std::size_t>(u) * rmax + (j - 1)]; }
    bool trivially_decoded = false;
};

/// One peeling iteration's expected change per state entry (d/dtau in the
/// fluid limit). stalled is set when no degree-one mass remains.
struct RateDelta {
    std::vector<double> dv;
    std::vector<double> dr;
    bool stalled = false;
};

enum class EvoOutcome { decoded, stalled };

struct TrajectorySample {
    double tau = 0.0;
    double r1_total = 0.0;
    double v_total = 0.0;
    std::vector<double> r1_layer;
    std::vector<double> v_layer;
    double v_outer = 0.0;  // loop family only, else 0
    double v_watch = 0.0;  // residual mass of EvoOptions::watch_positions
};

struct Trajectory {
    double epsilon = 0.0;
    EvoOutcome outcome = EvoOutcome::decoded;
    double end_tau = 0.0;
    std::vector<TrajectorySample> samples;
    DDState final_state;
};

struct EvoOptions {
    double step_scale = 5e-5;     // tau step = step_scale * occupied positions
    double v_tol = 1e-6;          // decoded when sum_u v_u falls below
    double r_tol = 1e-9;          // stalled when sum_u r_{1,u} falls below
    double denom_guard = 1e-12;   // positions with fewer edges are inert
    int sample_stride = 4;        // record every k-th step
    // A fluid trajectory that decays to a vanishing dip and then regrows by
    // orders of magnitude has outlived the regime where it describes the
    // decoder; such runs count as failures in threshold searches.
    double dip_ceiling = 2e-3;
    double dip_regrow_factor = 250.0;
    std::vector<int> watch_positions;  // per-sample residual mass of this set
};

struct ThresholdResult {
    double epsilon_star = 0.0;
    double bracket_width = 0.0;
    int trajectories_evaluated = 0;
};

enum class Regime { single_critical_point, steady_state_phase };

struct CriticalPoint {
    double tau = 0.0;
    double r1 = 0.0;
};

struct CriticalReport {
    std::vector<CriticalPoint> minima;
    Regime regime = Regime::single_critical_point;
    double plateau_start = 0.0;
    double plateau_end = 0.0;
    bool from_stalled_prefix = false;
};

struct CriticalOptions {
    double plateau_slope_tol = 1e-3;  // |d r1 / d tau| below this counts as flat
    double plateau_min_span = 2.0;    // tau units
};

/// Expected residual DD right after channel reduction (Eqs. of the binomial
/// thinning of check sockets). eps = 0 yields the empty, trivially decoded
/// state.
DDState init_state(const ConnectivityMatrix& T, double eps);

RateDelta step_expectation(const DDState& state, const ConnectivityMatrix& T);

Trajectory integrate(const ConnectivityMatrix& T, double eps, const EvoOptions& opts = {});

double r1_total(const DDState& state);
std::vector<double> per_layer_r1(const DDState& state, const std::vector<int>& layer_of_position, int layers);
std::vector<double> per_layer_v(const DDState& state, const std::vector<int>& layer_of_position, int layers);
double v_outer(const DDState& state, const std::vector<int>& outer_positions);

/// Collapse-and-regrow detection on a sampled trajectory; tau of the dip is
/// reported so that region queries can ignore later phases.
struct DipVerdict {
    bool spurious = false;
    double dip_tau = 0.0;
    double dip_value = 0.0;
};
DipVerdict dip_verdict(const Trajectory& traj, const EvoOptions& opts = {});

/// Largest erasure probability for which the mean evolution keeps a positive
/// degree-one fraction throughout decoding. Bisection on [0, 1].
ThresholdResult threshold(const ConnectivityMatrix& T, double tol, const EvoOptions& opts = {});

/// Largest erasure probability for which every listed position is emptied
/// before the mean evolution stalls.
ThresholdResult decodable_region_epsilon(const ConnectivityMatrix& T, const std::vector<int>& positions,
                                         double tol, const EvoOptions& opts = {});

CriticalReport critical_report(const Trajectory& traj, const CriticalOptions& opts = {});

}  // namespace scldpc
