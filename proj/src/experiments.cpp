#include "riskcut/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "riskcut/solver.hpp"

namespace riskcut {
namespace {

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool in_removed_band(double r) { return (r >= 0.3 && r <= 0.4) || (r >= 0.5 && r <= 0.6); }

Dataset dataset_from(const Eigen::VectorXi& labels, const Eigen::VectorXd& scores) {
  Dataset out;
  for (Eigen::Index i = 0; i < labels.size(); ++i) out.add(labels(i), scores(i));
  return out;
}

// Calls fn(j) for j in [0, count). Each index runs exactly once; callers write
// results into slot j so the outcome does not depend on scheduling.
template <class Fn>
void for_each_index(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const auto workers = std::min<std::size_t>(threads, count);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < count; j = next++) fn(j);
    });
  }
}

Eigen::Vector3d normalized_triple(const LinearModel& model) {
  const LinearModel unit = normalize_params(model);
  return {unit.weights(0), unit.weights(1), unit.intercept};
}

std::vector<double> grid_from(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

RunRecord run_interval_once(const StudySpec& spec, std::size_t run) {
  RunRecord record;
  record.run = run;
  record.seed = derive_seed(spec.base_seed, run);
  RandomStream rng(record.seed);

  Dataset train;
  std::optional<Dataset> test;
  if (spec.study == Study::Study2) {
    const Study2Data fit_data = gen_study2(spec.n, spec.beta, rng);
    const LinearModel model = fit_logistic(fit_data.features);
    train = dataset_from(fit_data.features.y, predict_scores(model, fit_data.features.x));
    const Study2Data holdout = gen_study2(spec.test_n, spec.beta, rng);
    test = dataset_from(holdout.features.y, predict_scores(model, holdout.features.x));
  } else {
    train = gen_study1(spec.n, spec.noise_rate, rng);
  }
  require_both_classes(train);

  record.per_gamma.reserve(spec.gamma_grid.size());
  for (const double gamma : spec.gamma_grid) {
    GammaRecord row;
    row.gamma = gamma;
    row.fit = solve_interval(train, gamma);
    if (row.fit.converged()) {
      row.train = evaluate_interval(train, *row.fit.interval);
      if (test) row.test = evaluate_interval(*test, *row.fit.interval);
    }
    record.per_gamma.push_back(std::move(row));
  }

  const RcCurve curve = rc_curve(train);
  record.aurc_train = aurc(curve);
  if (test) record.aurc_test = aurc(evaluate_curve(curve, *test));
  return record;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run) {
  return splitmix64(base_seed ^ splitmix64(run + 1));
}

const char* to_string(Study study) {
  switch (study) {
    case Study::Study1Clean:
      return "Study1Clean";
    case Study::Study1Noisy:
      return "Study1Noisy";
    case Study::Study2:
      return "Study2";
    case Study::Study3:
      return "Study3";
  }
  return "Unknown";
}

std::vector<double> strong_signal_beta() { return {1.0, 2.0, -2.0, 2.0, -2.0, -2.0}; }
std::vector<double> weak_signal_beta() { return {0.3, -0.5, 0.5, -0.5, 0.5, -0.5}; }

StudySpec StudySpec::defaults(Study study) {
  StudySpec spec;
  spec.study = study;
  switch (study) {
    case Study::Study1Noisy:
      spec.noise_rate = 0.03;
      [[fallthrough]];
    case Study::Study1Clean:
      spec.n = 200;
      spec.gamma_grid = {0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.125, 0.15,
                         0.2,  0.25, 0.3,  0.4,  0.5,   0.75, 1.0};
      break;
    case Study::Study2:
      spec.n = 1000;
      spec.beta = strong_signal_beta();
      spec.gamma_grid = grid_from(0.002, 1.0, 20);
      break;
    case Study::Study3:
      spec.n1 = 1000;
      spec.n2 = 200;
      break;
  }
  return spec;
}

void validate(const StudySpec& spec) {
  if (spec.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 0.5)) {
    throw std::invalid_argument("noise_rate must lie in [0, 0.5)");
  }
  if (spec.study == Study::Study3) {
    if (spec.n1 < 1) throw std::invalid_argument("n1 must be positive");
    if (!(spec.svm_cost > 0.0)) throw std::invalid_argument("svm cost must be positive");
    if (!(spec.coverage_target > 0.0 && spec.coverage_target <= 1.0)) {
      throw std::invalid_argument("coverage target must lie in (0, 1]");
    }
    return;
  }
  if (spec.n < 2) throw std::invalid_argument("n must be at least 2");
  if (spec.gamma_grid.empty()) throw std::invalid_argument("gamma grid is empty");
  for (std::size_t i = 0; i < spec.gamma_grid.size(); ++i) {
    if (!(spec.gamma_grid[i] > 0.0)) throw std::invalid_argument("gamma grid must be positive");
    if (i > 0 && !(spec.gamma_grid[i] > spec.gamma_grid[i - 1])) {
      throw std::invalid_argument("gamma grid must be strictly ascending");
    }
  }
  if (spec.study == Study::Study2) {
    if (spec.beta.size() < 2) throw std::invalid_argument("beta needs an intercept and a slope");
    if (spec.test_n < 2) throw std::invalid_argument("test_n must be at least 2");
  }
}

Dataset gen_study1(std::size_t n, double noise_rate, RandomStream& rng) {
  if (n < 2) throw std::invalid_argument("gen_study1 needs n >= 2");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) {
    throw std::invalid_argument("noise_rate must lie in [0, 0.5)");
  }
  std::vector<LabeledScore> items;
  items.reserve(n);
  while (items.size() < n) {
    const int label = rng.bernoulli(0.5) ? kPositive : kNegative;
    const double r = label == kPositive ? rng.uniform(0.4, 1.0) : rng.uniform(0.0, 0.5);
    if (in_removed_band(r)) continue;
    items.push_back({label, r});
  }
  const auto flips = static_cast<std::size_t>(std::lround(noise_rate * static_cast<double>(n)));
  if (flips > 0) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> chosen;
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), flips, rng.engine());
    for (const auto i : chosen) items[i].label = -items[i].label;
  }
  return Dataset(std::move(items));
}

Study2Data gen_study2(std::size_t n, const std::vector<double>& beta, RandomStream& rng) {
  if (beta.empty()) throw std::invalid_argument("beta needs at least an intercept");
  const auto p = static_cast<Eigen::Index>(beta.size() - 1);
  Study2Data out;
  out.features.x.resize(static_cast<Eigen::Index>(n), p);
  out.features.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    double eta = beta[0];
    for (Eigen::Index j = 0; j < p; ++j) {
      out.features.x(i, j) = rng.uniform();
      eta += beta[static_cast<std::size_t>(j) + 1] * out.features.x(i, j);
    }
    const int label = rng.bernoulli(expit(eta)) ? kPositive : kNegative;
    out.features.y(i) = label;
    out.true_scores.add(label, eta);
  }
  return out;
}

Study3Data gen_study3(std::size_t n1, std::size_t n2, RandomStream& rng) {
  if (n1 < 1) throw std::invalid_argument("gen_study3 needs n1 >= 1");
  Study3Data out;
  const auto n = static_cast<Eigen::Index>(n1 + n2);
  out.features.x.resize(n, 2);
  out.features.y.resize(n);
  out.group.reserve(static_cast<std::size_t>(n));

  // Line through the origin x2 = slope * x1, offset along its upward unit normal.
  auto place = [&](Eigen::Index row, double slope, double mean_offset) {
    const double x1 = rng.uniform(-4.0, 4.0);
    const int label = rng.bernoulli(0.5) ? kPositive : kNegative;
    const double t = rng.normal(mean_offset, 1.0);
    const double norm = std::hypot(slope, 1.0);
    const double nx = -slope / norm;
    const double ny = 1.0 / norm;
    out.features.x(row, 0) = x1 + label * t * nx;
    out.features.x(row, 1) = slope * x1 + label * t * ny;
    out.features.y(row) = label;
  };
  for (std::size_t i = 0; i < n1; ++i) {
    place(static_cast<Eigen::Index>(i), 5.0, 5.0);
    out.group.push_back(1);
  }
  for (std::size_t i = 0; i < n2; ++i) {
    place(static_cast<Eigen::Index>(n1 + i), 0.1, 1.0);
    out.group.push_back(2);
  }
  return out;
}

Eigen::Vector3d study3_truth() {
  LinearModel truth;
  truth.weights = Eigen::Vector2d(-5.0, 1.0);
  truth.intercept = 0.0;
  return normalized_triple(truth);
}

TwoStepResult two_step_pipeline(const FeatureMatrix& data, double cost, double coverage_target) {
  validate(data);
  TwoStepResult result;
  result.regular = fit_linear_svm(data, cost);
  const Dataset scored = dataset_from(data.y, predict_scores(result.regular, data.x));
  const RcCurve curve = rc_curve(scored);

  const RcPoint* selected = nullptr;
  for (const auto& point : curve.points) {
    if (point.coverage <= coverage_target) selected = &point;
  }
  if (selected == nullptr) {
    std::ostringstream msg;
    msg << "no interval reaches coverage <= " << coverage_target << "; achievable coverages:";
    for (const auto& point : curve.points) msg << ' ' << point.coverage;
    throw DataError(msg.str());
  }
  result.selected = *selected;
  result.interval = selected->interval;

  std::vector<bool> keep(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    keep[i] = decide(result.interval, scored[i].score) != Decision::Abstain;
  }
  const FeatureMatrix kept = data.subset(keep);
  result.n_kept = static_cast<std::size_t>(kept.rows());
  result.refit = fit_linear_svm(kept, cost);
  return result;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  // Summing the sorted copy keeps the mean independent of run order.
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.min = values.front();
  s.max = values.back();
  return s;
}

RunSummary run_interval_study(const StudySpec& spec) {
  validate(spec);
  if (spec.study == Study::Study3) throw std::invalid_argument("use run_study3 for Study 3");

  RunSummary summary;
  summary.spec = spec;
  summary.runs.resize(spec.runs);
  for_each_index(spec.runs, spec.threads, [&](std::size_t j) {
    try {
      summary.runs[j] = run_interval_once(spec, j);
    } catch (const std::exception& e) {
      summary.runs[j].run = j;
      summary.runs[j].seed = derive_seed(spec.base_seed, j);
      summary.runs[j].error = e.what();
    }
  });

  std::vector<double> aurc_train;
  std::vector<double> aurc_test;
  for (const auto& run : summary.runs) {
    if (run.error) {
      ++summary.n_failed;
      continue;
    }
    aurc_train.push_back(run.aurc_train);
    if (run.aurc_test) aurc_test.push_back(*run.aurc_test);
  }
  summary.aurc_train = summarize(std::move(aurc_train));
  summary.aurc_test = summarize(std::move(aurc_test));

  for (std::size_t g = 0; g < spec.gamma_grid.size(); ++g) {
    std::vector<double> center, half_width, lower, upper, coverage, acc_nonreject, acc_all;
    std::vector<double> t_coverage, t_acc_nonreject, t_acc_all;
    for (const auto& run : summary.runs) {
      if (run.error) continue;
      const GammaRecord& row = run.per_gamma[g];
      if (!row.fit.converged()) continue;
      const CutoffInterval& interval = *row.fit.interval;
      center.push_back(interval.center());
      half_width.push_back(interval.half_width());
      lower.push_back(interval.lower());
      upper.push_back(interval.upper());
      coverage.push_back(row.train->coverage);
      acc_all.push_back(row.train->acc_all);
      if (row.train->acc_nonreject) acc_nonreject.push_back(*row.train->acc_nonreject);
      if (row.test) {
        t_coverage.push_back(row.test->coverage);
        t_acc_all.push_back(row.test->acc_all);
        if (row.test->acc_nonreject) t_acc_nonreject.push_back(*row.test->acc_nonreject);
      }
    }
    GammaAggregate agg;
    agg.gamma = spec.gamma_grid[g];
    agg.n_converged = center.size();
    agg.center = summarize(std::move(center));
    agg.half_width = summarize(std::move(half_width));
    agg.lower = summarize(std::move(lower));
    agg.upper = summarize(std::move(upper));
    agg.coverage = summarize(std::move(coverage));
    agg.acc_nonreject = summarize(std::move(acc_nonreject));
    agg.acc_all = summarize(std::move(acc_all));
    agg.test_coverage = summarize(std::move(t_coverage));
    agg.test_acc_nonreject = summarize(std::move(t_acc_nonreject));
    agg.test_acc_all = summarize(std::move(t_acc_all));
    summary.per_gamma.push_back(agg);
  }
  return summary;
}

Study3Summary run_study3(const StudySpec& spec) {
  validate(spec);
  if (spec.study != Study::Study3) throw std::invalid_argument("run_study3 needs a Study 3 spec");

  struct Outcome {
    Eigen::Vector3d regular, two_step, group1;
    double coverage = 0.0;
    bool ok = false;
  };
  std::vector<Outcome> outcomes(spec.runs);
  for_each_index(spec.runs, spec.threads, [&](std::size_t j) {
    try {
      RandomStream rng(derive_seed(spec.base_seed, j));
      const Study3Data sample = gen_study3(spec.n1, spec.n2, rng);
      const TwoStepResult two_step =
          two_step_pipeline(sample.features, spec.svm_cost, spec.coverage_target);
      std::vector<bool> main_set(sample.group.size());
      for (std::size_t i = 0; i < main_set.size(); ++i) main_set[i] = sample.group[i] == 1;
      const LinearModel group1 = fit_linear_svm(sample.features.subset(main_set), spec.svm_cost);
      outcomes[j] = {normalized_triple(two_step.regular), normalized_triple(two_step.refit),
                     normalized_triple(group1), two_step.selected.coverage, true};
    } catch (const std::exception&) {
      outcomes[j].ok = false;
    }
  });

  Study3Summary summary;
  summary.spec = spec;
  summary.truth = study3_truth();
  const char* names[] = {"RegularSvm", "TwoStepSvm", "Group1Only"};
  std::vector<double> coverages;
  for (int m = 0; m < 3; ++m) {
    std::vector<Eigen::Vector3d> values;
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      values.push_back(m == 0 ? o.regular : (m == 1 ? o.two_step : o.group1));
    }
    MethodBias entry;
    entry.method = names[m];
    entry.count = values.size();
    if (!values.empty()) {
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (const auto& v : values) mean += v;
      mean /= static_cast<double>(values.size());
      Eigen::Vector3d var = Eigen::Vector3d::Zero();
      for (const auto& v : values) var += (v - mean).cwiseAbs2();
      if (values.size() > 1) var /= static_cast<double>(values.size() - 1);
      entry.bias = mean - summary.truth;
      entry.sd = var.cwiseSqrt();
    }
    summary.methods.push_back(entry);
  }
  for (const auto& o : outcomes) {
    if (o.ok) {
      coverages.push_back(o.coverage);
    } else {
      ++summary.n_failed;
    }
  }
  summary.coverage = summarize(std::move(coverages));
  return summary;
}

StudyResult run_replicated(const StudySpec& spec) {
  if (spec.study == Study::Study3) return run_study3(spec);
  return run_interval_study(spec);
}

}  // namespace riskcut
