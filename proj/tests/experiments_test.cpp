#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "riskcut/experiments.hpp"
#include "riskcut/solver.hpp"

using namespace riskcut;

namespace {

void expect_same(const Summary& a, const Summary& b) {
  EXPECT_EQ(a.count, b.count);
  EXPECT_EQ(a.median, b.median);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.min, b.min);
  EXPECT_EQ(a.max, b.max);
}

void expect_within_envelope(const Summary& s) {
  if (s.count == 0) return;
  EXPECT_LE(s.min, s.median);
  EXPECT_LE(s.median, s.max);
  EXPECT_LE(s.min, s.mean);
  EXPECT_LE(s.mean, s.max);
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(Seeding, SplitMixReferenceValue) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Seeding, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t j = 0; j < 10000; ++j) seen.insert(derive_seed(42, j));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
}

TEST(StudySpec, Validation) {
  StudySpec spec = StudySpec::defaults(Study::Study1Clean);
  EXPECT_NO_THROW(validate(spec));
  spec.runs = 0;
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = StudySpec::defaults(Study::Study1Noisy);
  EXPECT_EQ(spec.noise_rate, 0.03);
  spec.noise_rate = 0.5;
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = StudySpec::defaults(Study::Study1Clean);
  spec.gamma_grid = {0.2, 0.1};
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec.gamma_grid = {0.0, 0.1};
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = StudySpec::defaults(Study::Study3);
  spec.coverage_target = 0.0;
  EXPECT_THROW(validate(spec), std::invalid_argument);
}

TEST(GenStudy1, RespectsBandsAndRanges) {
  RandomStream rng(1);
  const Dataset data = gen_study1(5000, 0.0, rng);
  ASSERT_EQ(data.size(), 5000u);
  for (const auto& [y, r] : data) {
    EXPECT_FALSE(r >= 0.3 && r <= 0.4);
    EXPECT_FALSE(r >= 0.5 && r <= 0.6);
    if (y == kPositive) {
      EXPECT_GE(r, 0.4);
    } else {
      EXPECT_LE(r, 0.5);
    }
  }
}

TEST(GenStudy1, FlipsExactCount) {
  RandomStream clean_rng(derive_seed(42, 3));
  RandomStream noisy_rng(derive_seed(42, 3));
  const Dataset clean = gen_study1(200, 0.0, clean_rng);
  const Dataset noisy = gen_study1(200, 0.03, noisy_rng);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_EQ(clean[i].score, noisy[i].score);
    if (clean[i].label != noisy[i].label) ++flipped;
  }
  EXPECT_EQ(flipped, 6u);
}

TEST(GenStudy1, OverlapRegionConverges) {
  RandomStream rng(2);
  const Dataset data = gen_study1(100000, 0.0, rng);
  const FitReport hard = solve_hard_margin(data);
  EXPECT_NEAR(hard.interval->lower(), 0.4, 1e-3);
  EXPECT_NEAR(hard.interval->upper(), 0.5, 1e-3);
}

TEST(GenStudy2, PositiveRates) {
  RandomStream rng(3);
  const Study2Data null_data = gen_study2(100000, {0.0, 0.0, 0.0}, rng);
  EXPECT_NEAR(static_cast<double>(null_data.true_scores.count_positive()) / 1e5, 0.5, 0.01);

  // Independent Monte Carlo estimate of E expit(beta_0 + beta'x).
  std::mt19937_64 mc(99);
  std::uniform_real_distribution<double> u;
  const auto beta = strong_signal_beta();
  double expected = 0.0;
  for (int i = 0; i < 200000; ++i) {
    double eta = beta[0];
    for (std::size_t j = 1; j < beta.size(); ++j) eta += beta[j] * u(mc);
    expected += 1.0 / (1.0 + std::exp(-eta));
  }
  expected /= 200000.0;
  const Study2Data strong = gen_study2(100000, beta, rng);
  EXPECT_NEAR(static_cast<double>(strong.true_scores.count_positive()) / 1e5, expected, 0.01);
  EXPECT_EQ(strong.features.cols(), 5);
  EXPECT_GE(strong.features.x.minCoeff(), 0.0);
  EXPECT_LE(strong.features.x.maxCoeff(), 1.0);
}

TEST(GenStudy2, WeakSignalHasLowerTrueAuc) {
  RandomStream rng(4);
  const Study2Data strong = gen_study2(20000, strong_signal_beta(), rng);
  const Study2Data weak = gen_study2(20000, weak_signal_beta(), rng);
  EXPECT_LT(roc_auc(weak.true_scores), roc_auc(strong.true_scores));
}

TEST(GenStudy3, WrongSideFractions) {
  RandomStream rng(5);
  const std::size_t n = 100000;
  const Study3Data sample = gen_study3(n, n, rng);
  const Eigen::Vector2d normal1 = Eigen::Vector2d(-5.0, 1.0).normalized();
  const Eigen::Vector2d normal2 = Eigen::Vector2d(-0.1, 1.0).normalized();
  std::size_t wrong1 = 0;
  std::size_t wrong2 = 0;
  for (Eigen::Index i = 0; i < sample.features.rows(); ++i) {
    const Eigen::Vector2d x = sample.features.x.row(i).transpose();
    const int y = sample.features.y(i);
    if (sample.group[static_cast<std::size_t>(i)] == 1) {
      if (y * normal1.dot(x) < 0.0) ++wrong1;
    } else if (y * normal2.dot(x) < 0.0) {
      ++wrong2;
    }
  }
  EXPECT_LE(wrong1, 5u);
  EXPECT_NEAR(static_cast<double>(wrong2) / n, phi(-1.0), 0.005);
}

TEST(GenStudy3, GroupSizes) {
  RandomStream rng(6);
  const Study3Data sample = gen_study3(1000, 200, rng);
  EXPECT_EQ(sample.features.rows(), 1200);
  EXPECT_EQ(std::count(sample.group.begin(), sample.group.end(), 2), 200);
  // 200 of 2200 points reproduces the quoted 9.09% share.
  const Study3Data quoted = gen_study3(2000, 200, rng);
  const auto second = std::count(quoted.group.begin(), quoted.group.end(), 2);
  EXPECT_NEAR(static_cast<double>(second) / static_cast<double>(quoted.group.size()), 0.0909, 1e-4);
}

TEST(TwoStep, FullCoverageUsesCutoffPoint) {
  RandomStream rng(7);
  const Study3Data sample = gen_study3(300, 60, rng);
  const TwoStepResult result = two_step_pipeline(sample.features, 1.0, 1.0);
  EXPECT_EQ(result.interval.half_width(), 0.0);
  EXPECT_EQ(result.selected.rank_k, 0u);
  EXPECT_GE(result.n_kept, static_cast<std::size_t>(sample.features.rows()) - 1);
}

TEST(TwoStep, UnreachableTargetListsCoverages) {
  RandomStream rng(8);
  const Study3Data sample = gen_study3(300, 60, rng);
  try {
    two_step_pipeline(sample.features, 1.0, 1e-9);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("achievable coverages"), std::string::npos);
  }
}

TEST(TwoStep, SeparableMainSetHasNoPartialCoverage) {
  // The main set alone is linearly separable, so its curve is the single
  // full-coverage point and no target below 1 is reachable.
  RandomStream rng(9);
  const Study3Data sample = gen_study3(600, 0, rng);
  EXPECT_THROW(two_step_pipeline(sample.features, 1.0, 0.85), DataError);
  const TwoStepResult full = two_step_pipeline(sample.features, 1.0, 1.0);
  EXPECT_EQ(full.selected.coverage, 1.0);
  const LinearModel a = normalize_params(full.regular);
  const LinearModel b = normalize_params(full.refit);
  EXPECT_NEAR(a.weights(0), b.weights(0), 1e-6);
  EXPECT_NEAR(a.weights(1), b.weights(1), 1e-6);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-6);
}

TEST(Summarize, MedianMeanAndOrder) {
  Summary s = summarize({3.0, 1.0, 2.0});
  EXPECT_EQ(s.median, 2.0);
  EXPECT_EQ(s.mean, 2.0);
  s = summarize({4.0, 1.0, 2.0, 3.0});
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_EQ(summarize({}).count, 0u);

  std::vector<double> values;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 1000; ++i) values.push_back(u(rng));
  const Summary a = summarize(values);
  std::shuffle(values.begin(), values.end(), rng);
  expect_same(a, summarize(values));
}

TEST(RunReplicated, StudyOneDeterministicAcrossThreads) {
  StudySpec spec = StudySpec::defaults(Study::Study1Noisy);
  spec.runs = 40;
  const RunSummary serial = run_interval_study(spec);
  spec.threads = 4;
  const RunSummary parallel = run_interval_study(spec);
  ASSERT_EQ(serial.per_gamma.size(), parallel.per_gamma.size());
  expect_same(serial.aurc_train, parallel.aurc_train);
  for (std::size_t g = 0; g < serial.per_gamma.size(); ++g) {
    const auto& a = serial.per_gamma[g];
    const auto& b = parallel.per_gamma[g];
    EXPECT_EQ(a.n_converged, b.n_converged);
    expect_same(a.center, b.center);
    expect_same(a.half_width, b.half_width);
    expect_same(a.coverage, b.coverage);
    expect_same(a.acc_all, b.acc_all);
    expect_within_envelope(a.center);
    expect_within_envelope(a.half_width);
  }
  for (std::size_t j = 0; j < serial.runs.size(); ++j) {
    EXPECT_EQ(serial.runs[j].seed, derive_seed(spec.base_seed, j));
    EXPECT_EQ(serial.runs[j].aurc_train, parallel.runs[j].aurc_train);
  }
}

TEST(RunReplicated, StudyTwoHasHoldout) {
  StudySpec spec = StudySpec::defaults(Study::Study2);
  spec.runs = 4;
  spec.n = 300;
  spec.test_n = 200;
  const RunSummary summary = run_interval_study(spec);
  EXPECT_EQ(summary.n_failed, 0u);
  EXPECT_EQ(summary.aurc_test.count, 4u);
  for (const auto& g : summary.per_gamma) {
    if (g.n_converged > 0) {
      EXPECT_EQ(g.test_coverage.count, g.n_converged);
    }
  }
}

TEST(RunReplicated, StudyThreeDeterministicAcrossThreads) {
  StudySpec spec = StudySpec::defaults(Study::Study3);
  spec.runs = 4;
  spec.n1 = 200;
  spec.n2 = 40;
  const Study3Summary serial = run_study3(spec);
  spec.threads = 3;
  const Study3Summary parallel = run_study3(spec);
  ASSERT_EQ(serial.methods.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(serial.methods[m].method, parallel.methods[m].method);
    EXPECT_EQ(serial.methods[m].bias, parallel.methods[m].bias);
    EXPECT_EQ(serial.methods[m].sd, parallel.methods[m].sd);
    EXPECT_GE(serial.methods[m].sd.minCoeff(), 0.0);
  }
  EXPECT_EQ(serial.methods[0].method, "RegularSvm");
  EXPECT_EQ(serial.methods[1].method, "TwoStepSvm");
  EXPECT_EQ(serial.methods[2].method, "Group1Only");
}

TEST(RunReplicated, FailedRunsAreCountedNotThrown) {
  StudySpec spec = StudySpec::defaults(Study::Study2);
  spec.runs = 60;
  spec.n = 2;
  spec.test_n = 2;
  const RunSummary summary = run_interval_study(spec);
  EXPECT_GT(summary.n_failed, 0u);
  std::size_t with_error = 0;
  for (const auto& run : summary.runs) with_error += run.error ? 1 : 0;
  EXPECT_EQ(with_error, summary.n_failed);
  EXPECT_EQ(summary.aurc_train.count + summary.n_failed, spec.runs);
}

TEST(RunReplicated, DispatchesOnStudy) {
  StudySpec spec = StudySpec::defaults(Study::Study1Clean);
  spec.runs = 2;
  EXPECT_TRUE(std::holds_alternative<RunSummary>(run_replicated(spec)));
  EXPECT_THROW(run_study3(spec), std::invalid_argument);
}
