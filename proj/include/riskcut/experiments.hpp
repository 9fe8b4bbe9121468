#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "riskcut/classifiers.hpp"
#include "riskcut/core.hpp"
#include "riskcut/metrics.hpp"

namespace riskcut {

/// SplitMix64 finalizer; used to derive well-separated 64-bit seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of run j: splitmix64(base ^ splitmix64(j + 1)).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run);

/// Random stream backed by std::mt19937_64. Bit patterns are reproducible for
/// a given standard library; results are not promised across implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(engine_);
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

enum class Study { Study1Clean, Study1Noisy, Study2, Study3 };

const char* to_string(Study study);

/// Logistic coefficients (intercept first) of the two signal strengths.
std::vector<double> strong_signal_beta();
std::vector<double> weak_signal_beta();

struct StudySpec {
  Study study = Study::Study1Clean;
  std::size_t n = 200;      // Study 1 / Study 2 training size
  std::size_t n1 = 1000;    // Study 3 main set
  std::size_t n2 = 200;     // Study 3 contamination set
  std::vector<double> beta;  // Study 2, intercept first
  double noise_rate = 0.0;   // Study 1 label flip fraction
  std::vector<double> gamma_grid;
  std::size_t runs = 200;
  std::uint64_t base_seed = 42;
  std::size_t test_n = 500;  // Study 2 holdout size
  double svm_cost = 1.0;           // Study 3
  double coverage_target = 0.85;   // Study 3
  unsigned threads = 1;

  static StudySpec defaults(Study study);
};

/// Throws std::invalid_argument on a spec that cannot be run.
void validate(const StudySpec& spec);

/// Positives ~ U(0.4, 1), negatives ~ U(0, 0.5), labels Bernoulli(1/2); points
/// in [0.3, 0.4] or [0.5, 0.6] are redrawn until n are kept, then
/// round(noise_rate * n) labels chosen uniformly are flipped.
Dataset gen_study1(std::size_t n, double noise_rate, RandomStream& rng);

struct Study2Data {
  FeatureMatrix features;
  Dataset true_scores;  // beta_0 + beta'x with the drawn labels
};

/// x_ij ~ U(0, 1), y = +1 with probability expit(beta_0 + beta'x).
Study2Data gen_study2(std::size_t n, const std::vector<double>& beta, RandomStream& rng);

struct Study3Data {
  FeatureMatrix features;
  std::vector<int> group;  // 1 = main set, 2 = contamination set
};

/// Main set about -5 x1 + x2 = 0 with offsets y * N(5, 1) along the unit
/// normal; contamination set about x2 = 0.1 x1 with offsets y * N(1, 1).
/// x1 ~ U(-4, 4), y Bernoulli(1/2) in both.
Study3Data gen_study3(std::size_t n1, std::size_t n2, RandomStream& rng);

/// Normalized (w1, w2, b) of the main-set boundary: (-5, 1, 0) / sqrt(26),
/// sign-flipped.
Eigen::Vector3d study3_truth();

struct TwoStepResult {
  LinearModel regular;
  CutoffInterval interval;
  RcPoint selected;
  LinearModel refit;
  std::size_t n_kept = 0;
};

/// Fits an SVM, picks the largest-coverage solution on the risk-coverage curve
/// of its scores with coverage <= coverage_target, and refits on the points
/// outside the closed interval. Throws DataError if no solution meets the
/// target.
TwoStepResult two_step_pipeline(const FeatureMatrix& data, double cost, double coverage_target);

struct GammaRecord {
  double gamma = 0.0;
  FitReport fit;
  std::optional<IntervalEvaluation> train;
  std::optional<IntervalEvaluation> test;
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<GammaRecord> per_gamma;
  double aurc_train = 0.0;
  std::optional<double> aurc_test;
  std::optional<std::string> error;
};

struct Summary {
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Order-independent summary (sorts a copy). Empty input gives count 0.
Summary summarize(std::vector<double> values);

struct GammaAggregate {
  double gamma = 0.0;
  std::size_t n_converged = 0;
  Summary center, half_width, lower, upper;
  Summary coverage, acc_nonreject, acc_all;
  Summary test_coverage, test_acc_nonreject, test_acc_all;
};

struct RunSummary {
  StudySpec spec;
  std::vector<GammaAggregate> per_gamma;
  Summary aurc_train;
  Summary aurc_test;
  std::size_t n_failed = 0;
  std::vector<RunRecord> runs;
};

struct MethodBias {
  std::string method;
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();
  Eigen::Vector3d sd = Eigen::Vector3d::Zero();
  std::size_t count = 0;
};

struct Study3Summary {
  StudySpec spec;
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();
  std::vector<MethodBias> methods;  // RegularSvm, TwoStepSvm, Group1Only
  Summary coverage;                 // selected coverage of the two-step interval
  std::size_t n_failed = 0;
};

/// Studies I and II.
RunSummary run_interval_study(const StudySpec& spec);

Study3Summary run_study3(const StudySpec& spec);

using StudyResult = std::variant<RunSummary, Study3Summary>;

StudyResult run_replicated(const StudySpec& spec);

}  // namespace riskcut
