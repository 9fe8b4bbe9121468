#include "riskcut/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace riskcut::theory {
namespace {

constexpr double kQuadratureTol = 1e-8;
constexpr double kBisectionTol = 1e-10;

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_step(const ScalarFn& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw std::runtime_error("adaptive quadrature did not converge");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

RiskModel::RiskModel(ScalarFn pi, ScalarFn cdf, ScalarFn quantile, double support_lower,
                     double support_upper)
    : pi_(std::move(pi)),
      cdf_(std::move(cdf)),
      quantile_(std::move(quantile)),
      lower_(support_lower),
      upper_(support_upper) {
  if (!(lower_ < upper_)) throw std::invalid_argument("support must be a proper interval");
  constexpr int kChecks = 1000;
  double previous = pi_(lower_);
  for (int i = 1; i <= kChecks; ++i) {
    const double r = lower_ + (upper_ - lower_) * i / kChecks;
    const double value = pi_(r);
    if (value < previous) throw std::invalid_argument("pi must be non-decreasing");
    previous = value;
  }
  if (std::abs(cdf_(lower_)) > 1e-9 || std::abs(cdf_(upper_) - 1.0) > 1e-9) {
    throw std::invalid_argument("score cdf must run from 0 to 1 over the support");
  }
}

RiskModel RiskModel::uniform(ScalarFn pi, double lower, double upper) {
  const double width = upper - lower;
  return RiskModel(
      std::move(pi),
      [=](double r) { return std::clamp((r - lower) / width, 0.0, 1.0); },
      [=](double p) { return lower + std::clamp(p, 0.0, 1.0) * width; }, lower, upper);
}

double RiskModel::coverage(double center, double half_width) const {
  return cdf_(center - half_width) + (1.0 - cdf_(center + half_width));
}

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return simpson_step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth);
}

double population_risk(const RiskModel& model, double center, double half_width) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("half-width must be non-negative");
  const double p_low = model.cdf(center - half_width);
  const double p_high = model.cdf(center + half_width);
  const double covered = p_low + (1.0 - p_high);

  // Integrate against the score distribution through its quantile function:
  // int_{r > c + d} pi dF = int_{F(c + d)}^{1} pi(Q(p)) dp.
  const ScalarFn correct_positive = [&](double p) { return model.pi(model.quantile(p)); };
  const ScalarFn correct_negative = [&](double p) {
    return 1.0 - model.pi(model.quantile(p));
  };
  const double correct = adaptive_simpson(correct_positive, p_high, 1.0, 0.5 * kQuadratureTol) +
                         adaptive_simpson(correct_negative, 0.0, p_low, 0.5 * kQuadratureTol);
  return std::max(0.0, covered - correct);
}

double optimal_center(const RiskModel& model) {
  double lo = model.support_lower();
  double hi = model.support_upper();
  const double f_lo = model.pi(lo) - 0.5;
  const double f_hi = model.pi(hi) - 0.5;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw std::invalid_argument("pi does not cross 1/2 on the support");
  }
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f_mid = model.pi(mid) - 0.5;
    if (std::abs(f_mid) <= kBisectionTol && hi - lo <= kBisectionTol) break;
    if (f_mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * std::abs(mid)) break;
  }
  return mid;
}

double optimal_halfwidth(const RiskModel& model, double center, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in [0, 1]");
  if (model.coverage(center, 0.0) <= theta) return 0.0;
  double lo = 0.0;
  double hi = std::max(center - model.support_lower(), model.support_upper() - center);
  // coverage is non-increasing in d; keep coverage(lo) > theta >= coverage(hi).
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (model.coverage(center, mid) <= theta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ScalarFn symmetrize(ScalarFn pi, double center) {
  return [pi = std::move(pi), center](double r) {
    const double a = r - center;
    return 0.5 + 0.5 * (pi(center + a) - pi(center - a));
  };
}

PopulationOptimum population_optimum_grid(const RiskModel& model, double theta,
                                          std::size_t grid_size) {
  if (grid_size < 100) throw std::invalid_argument("grid_size must be at least 100");
  const double lo = model.support_lower();
  const double hi = model.support_upper();
  PopulationOptimum best;
  best.risk = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double c = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double d = optimal_halfwidth(model, c, theta);
    const double risk = population_risk(model, c, d);
    if (risk < best.risk) best = {c, d, risk};
  }
  return best;
}

}  // namespace riskcut::theory
