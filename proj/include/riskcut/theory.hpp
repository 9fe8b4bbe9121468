#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace riskcut::theory {

using ScalarFn = std::function<double(double)>;

/// Population model of a risk score: pi(r) = P(y = +1 | r) together with the
/// continuous distribution of r on a bounded support.
class RiskModel {
 public:
  /// Throws std::invalid_argument if pi decreases on a 1000-point grid over
  /// the support or the cdf does not run from 0 to 1 across it.
  RiskModel(ScalarFn pi, ScalarFn cdf, ScalarFn quantile, double support_lower,
            double support_upper);

  /// r ~ Uniform(lower, upper).
  static RiskModel uniform(ScalarFn pi, double lower = 0.0, double upper = 1.0);

  double pi(double r) const { return pi_(r); }
  double cdf(double r) const { return cdf_(r); }
  double quantile(double p) const { return quantile_(p); }
  double support_lower() const { return lower_; }
  double support_upper() const { return upper_; }

  /// P(|r - center| > half_width).
  double coverage(double center, double half_width) const;

 private:
  ScalarFn pi_;
  ScalarFn cdf_;
  ScalarFn quantile_;
  double lower_;
  double upper_;
};

struct PopulationOptimum {
  double center = 0.0;
  double half_width = 0.0;
  double risk = 0.0;
};

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
/// Throws std::runtime_error when the recursion depth is exhausted.
double adaptive_simpson(const ScalarFn& f, double a, double b, double tol,
                        int max_depth = 50);

/// P(|r - c| > d and the decision is wrong)
///   = theta(c, d) - E[pi(r) 1(r > c + d) + (1 - pi(r)) 1(r < c - d)].
double population_risk(const RiskModel& model, double center, double half_width);

/// Root of pi(r) = 1/2 on the support, by bisection.
double optimal_center(const RiskModel& model);

/// Smallest d >= 0 with P(|r - center| > d) <= theta, by bisection.
double optimal_halfwidth(const RiskModel& model, double center, double theta);

/// 1/2 + (pi(center + a) - pi(center - a)) / 2 with a = r - center: symmetric
/// about center, equal to 1/2 there, and order-preserving for increasing pi.
ScalarFn symmetrize(ScalarFn pi, double center);

/// Grid search over centers on the support, each paired with the half-width
/// that fixes the coverage at theta. Brute-force reference for the
/// (optimal_center, optimal_halfwidth) pair.
PopulationOptimum population_optimum_grid(const RiskModel& model, double theta,
                                          std::size_t grid_size);

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace riskcut::theory
