#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "riskcut/core.hpp"

namespace riskcut {

/// Optimal multipliers of the dual problem
///   min sum_i y_i r_i mu_i  s.t.  0 <= mu_i <= gamma, sum mu_i = 1 - alpha,
///                                 sum y_i mu_i = 0, alpha >= 0.
struct DualSolution {
  std::vector<double> mu;      // indexed like the dataset
  std::vector<double> lambda;  // gamma - mu
  double alpha = 0.0;
  double dual_value = 0.0;     // -sum_i mu_i y_i r_i
  double gamma = 0.0;
  /// True when the class capacity gamma * min(n+, n-) ran out before the
  /// per-class mass reached 1/2 while pairing was still profitable; the
  /// sum(mu) = 1 regime is then infeasible.
  bool capacity_limited = false;
};

struct KktReport {
  /// |sum mu_i y_i|, |1 - alpha - sum mu_i|, max_i |gamma - lambda_i - mu_i|.
  std::array<double, 3> stationarity_residuals{};
  double primal_feasibility_violation = 0.0;
  double dual_feasibility_violation = 0.0;
  /// max over alpha*d, lambda_i*xi_i, mu_i*A_i.
  double slackness_violation = 0.0;
  double duality_gap = 0.0;
  bool pass = false;
};

/// Flat region [lower, upper] of minimizers of the cutoff-point objective
/// sum_{y=+1} (c - r_i)_+ + sum_{y=-1} (r_i - c)_+, and its midpoint.
struct CutoffRegion {
  double lower = 0.0;
  double upper = 0.0;
  double cutoff = 0.0;
  bool tie = false;
};

/// 1 / (2 min(n+, n-)); the interval problem is solved for gamma strictly above.
double feasibility_bound(const Dataset& data);

/// Global minimizer of d + gamma * sum hinge via the decoupled quantile rule:
/// l = k-th smallest positive, u = k-th largest negative, k = ceil(1/(2 gamma)).
/// Crossed quantiles fall back to the d = 0 cutoff point.
FitReport solve_interval(const Dataset& data, double gamma);

/// Narrowest interval outside of which every point is classified correctly.
FitReport solve_hard_margin(const Dataset& data);

CutoffRegion solve_cutoff_region(const Dataset& data);

/// Midpoint of the optimal cutoff-point region. Independent of gamma, which
/// only scales the objective.
double solve_cutoff_point(const Dataset& data, double gamma);

/// Exact greedy solution of the dual: pairs the lowest positives with the
/// highest negatives in chunks of at most gamma while pairing lowers the
/// objective and the per-class mass is below 1/2.
DualSolution solve_dual_greedy(const Dataset& data, double gamma);

/// Recovers the primal interval from dual multipliers by the support-vector
/// case analysis. Points are sorted into S1 (0 < mu < gamma), S2 (mu = 0) and
/// S3 (mu = gamma) with absolute tolerance 1e-9 * gamma. Throws
/// std::invalid_argument if the multipliers violate the dual constraints.
FitReport recover_interval(const DualSolution& dual, const Dataset& data);

/// Exhaustive search over endpoint pairs drawn from the scores and midpoints
/// of consecutive distinct scores. O(n^3); refuses datasets above max_points.
FitReport brute_force_oracle(const Dataset& data, double gamma,
                             std::size_t max_points = 500);

KktReport verify_kkt(const Dataset& data, double gamma, const FitReport& primal,
                     const DualSolution& dual, double tol);

}  // namespace riskcut
