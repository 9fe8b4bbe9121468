#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "riskcut/theory.hpp"

using namespace riskcut::theory;

namespace {

RiskModel logistic_model(double slope, double center) {
  return RiskModel::uniform([=](double r) { return expit(slope * (r - center)); });
}

}  // namespace

TEST(AdaptiveSimpson, KnownIntegrals) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-10),
              2.0, 1e-9);
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0, 1e-12), 9.0, 1e-11);
  EXPECT_EQ(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0, 1e-8), 0.0);
}

TEST(RiskModel, ValidatesInputs) {
  EXPECT_THROW(RiskModel::uniform([](double r) { return 1.0 - r; }), std::invalid_argument);
  EXPECT_THROW(RiskModel::uniform([](double r) { return r; }, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(RiskModel([](double r) { return r; }, [](double r) { return 0.5 * r; },
                         [](double p) { return 2.0 * p; }, 0.0, 1.0),
               std::invalid_argument);
  const RiskModel model = RiskModel::uniform([](double r) { return r; });
  EXPECT_NEAR(model.coverage(0.5, 0.1), 0.8, 1e-15);
}

TEST(PopulationRisk, Examples) {
  const RiskModel linear = RiskModel::uniform([](double r) { return r; });
  EXPECT_NEAR(population_risk(linear, 0.5, 0.0), 0.25, 1e-8);
  EXPECT_NEAR(population_risk(linear, 0.5, 0.6), 0.0, 1e-12);
  const RiskModel all_positive = RiskModel::uniform([](double) { return 1.0; });
  EXPECT_NEAR(population_risk(all_positive, -0.1, 0.0), 0.0, 1e-12);
  EXPECT_THROW(population_risk(linear, 0.5, -0.1), std::invalid_argument);
}

TEST(PopulationRisk, MatchesClosedFormForLinearPi) {
  // pi(r) = r, r ~ U(0,1): risk = int_0^{c-d} r dr + int_{c+d}^1 (1 - r) dr.
  const RiskModel linear = RiskModel::uniform([](double r) { return r; });
  for (double c = 0.2; c <= 0.8; c += 0.05) {
    for (double d = 0.0; d <= 0.2; d += 0.05) {
      const double lo = std::max(0.0, c - d);
      const double hi = std::min(1.0, c + d);
      const double expected = 0.5 * lo * lo + 0.5 * (1.0 - hi) * (1.0 - hi);
      EXPECT_NEAR(population_risk(linear, c, d), expected, 1e-8);
    }
  }
}

TEST(PopulationRisk, NeverExceedsCoverage) {
  const RiskModel model = logistic_model(10.0, 0.45);
  for (const double theta : {0.5, 0.8, 0.9, 0.95, 1.0}) {
    for (double c = 0.1; c <= 0.9; c += 0.1) {
      const double d = optimal_halfwidth(model, c, theta);
      EXPECT_LE(population_risk(model, c, d), theta + 1e-9);
    }
  }
}

TEST(OptimalCenter, Examples) {
  EXPECT_NEAR(optimal_center(logistic_model(10.0, 0.45)), 0.45, 1e-9);
  EXPECT_NEAR(optimal_center(RiskModel::uniform([](double r) { return r; })), 0.5, 1e-9);
  EXPECT_NEAR(optimal_center(RiskModel::uniform([](double r) { return expit(2.0 * r - 1.0); })),
              0.5, 1e-9);
  EXPECT_THROW(optimal_center(RiskModel::uniform([](double r) { return 0.6 + 0.1 * r; })),
               std::invalid_argument);
}

TEST(OptimalHalfwidth, Examples) {
  const RiskModel model = RiskModel::uniform([](double r) { return r; });
  EXPECT_NEAR(optimal_halfwidth(model, 0.5, 0.8), 0.1, 1e-9);
  EXPECT_EQ(optimal_halfwidth(model, 0.5, 1.0), 0.0);
  EXPECT_NEAR(optimal_halfwidth(model, 0.5, 0.0), 0.5, 1e-9);
  EXPECT_THROW(optimal_halfwidth(model, 0.5, 1.5), std::invalid_argument);
}

TEST(Symmetrize, FixedPointOfSymmetricPi) {
  const auto pi = [](double r) { return expit(7.0 * (r - 0.4)); };
  const ScalarFn sym = symmetrize(pi, 0.4);
  for (double r = -0.5; r <= 1.5; r += 0.01) EXPECT_NEAR(sym(r), pi(r), 1e-12);
}

TEST(Symmetrize, LemmaClaims) {
  // Monotone but asymmetric about its crossing point.
  const auto pi = [](double r) { return expit((r < 0.3 ? 8.0 : 3.0) * (r - 0.3)); };
  const double center = 0.3;
  const ScalarFn sym = symmetrize(pi, center);
  EXPECT_NEAR(sym(center), 0.5, 1e-15);
  for (double a = 0.0; a <= 1.0; a += 0.01) {
    EXPECT_NEAR(sym(center - a) + sym(center + a), 1.0, 1e-12);
    EXPECT_GE(sym(center + a), 0.0);
    EXPECT_LE(sym(center + a), 1.0);
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 2000; ++i) {
    const double r1 = u(rng);
    const double r2 = u(rng);
    if (pi(r1) >= pi(r2)) {
      EXPECT_GE(sym(r1), sym(r2));
    }
  }
}

TEST(PopulationOptimumGrid, AgreesWithOptimalPairForSymmetricPi) {
  const RiskModel model = logistic_model(10.0, 0.45);
  const double c_star = optimal_center(model);
  for (const double theta : {0.8, 0.9, 0.95}) {
    const double d_star = optimal_halfwidth(model, c_star, theta);
    const PopulationOptimum grid = population_optimum_grid(model, theta, 400);
    EXPECT_LE(population_risk(model, c_star, d_star), grid.risk + 1e-3);
    EXPECT_NEAR(grid.center, c_star, 1.0 / 399.0);
  }
  EXPECT_THROW(population_optimum_grid(model, 0.9, 99), std::invalid_argument);
}

TEST(PopulationOptimumGrid, FullCoverageGivesBayesCutoff) {
  const RiskModel model = logistic_model(10.0, 0.45);
  const PopulationOptimum grid = population_optimum_grid(model, 1.0, 401);
  EXPECT_EQ(grid.half_width, 0.0);
  EXPECT_NEAR(grid.center, 0.45, 1.0 / 400.0);
}

TEST(PopulationOptimumGrid, AsymmetricPiReportsGap) {
  const RiskModel model = RiskModel::uniform(
      [](double r) { return r < 0.5 ? 0.5 * std::pow(2.0 * r, 6.0) : 0.5 + 0.5 * std::sqrt(2.0 * r - 1.0); });
  const double c_star = optimal_center(model);
  const double d_star = optimal_halfwidth(model, c_star, 0.8);
  const PopulationOptimum grid = population_optimum_grid(model, 0.8, 200);
  const double gap = population_risk(model, c_star, d_star) - grid.risk;
  EXPECT_TRUE(std::isfinite(gap));
  EXPECT_GE(gap, -1e-3);
}
