#include "riskcut/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace riskcut {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive and finite");
  }
}

bool feasible(const Dataset& data, double gamma) {
  return gamma * static_cast<double>(data.count_positive()) > 0.5 &&
         gamma * static_cast<double>(data.count_negative()) > 0.5;
}

// Dataset indices of one class, ordered by score (ascending or descending),
// ties broken by index.
std::vector<std::size_t> ranked_indices(const Dataset& data, int label,
                                        bool ascending) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].label == label) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? data[a].score < data[b].score
                     : data[a].score > data[b].score;
  });
  return idx;
}

FitReport finish(const Dataset& data, double gamma, FitStatus status,
                 CutoffInterval interval, bool tie) {
  FitReport report;
  report.gamma = gamma;
  report.status = status;
  report.interval = interval;
  report.objective = primal_objective(data, interval, gamma);
  report.tie_flag = tie;
  return report;
}

}  // namespace

double feasibility_bound(const Dataset& data) {
  require_both_classes(data);
  const auto n_min = std::min(data.count_positive(), data.count_negative());
  return 0.5 / static_cast<double>(n_min);
}

CutoffRegion solve_cutoff_region(const Dataset& data) {
  require_both_classes(data);
  std::vector<LabeledScore> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });

  // The objective is convex piecewise linear with integer slopes
  //   right slope at s = #{pos <= s} - #{neg > s}.
  // Its minimizers form [a, b]: a is the first distinct score whose right
  // slope is >= 0, b the first one from there whose right slope is > 0.
  const auto n_neg = static_cast<long>(data.count_negative());
  long pos_le = 0;
  long neg_le = 0;
  std::optional<double> lower;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double s = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == s) {
      (sorted[i].label == kPositive ? pos_le : neg_le) += 1;
      ++i;
    }
    const long slope = pos_le - (n_neg - neg_le);
    if (!lower && slope >= 0) lower = s;
    if (lower && slope > 0) {
      CutoffRegion region;
      region.lower = *lower;
      region.upper = s;
      region.cutoff = 0.5 * (region.lower + region.upper);
      region.tie = region.lower < region.upper;
      return region;
    }
  }
  // Unreachable with both classes present: the right slope at the largest
  // score equals n+ > 0.
  throw std::logic_error("cutoff region search did not terminate");
}

double solve_cutoff_point(const Dataset& data, double gamma) {
  require_positive_gamma(gamma);
  return solve_cutoff_region(data).cutoff;
}

FitReport solve_interval(const Dataset& data, double gamma) {
  require_positive_gamma(gamma);
  require_both_classes(data);

  if (!feasible(data, gamma)) {
    FitReport report;
    report.gamma = gamma;
    report.status = FitStatus::NonConvergence;
    return report;
  }

  auto pos = data.scores_of(kPositive);
  auto neg = data.scores_of(kNegative);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  // (u - l)/2 + gamma sum_{pos} (l - r)_+ decreases in l while fewer than
  // 1/(2 gamma) positives lie below l. When 1/(2 gamma) is an integer the
  // objective is flat between the k-th and (k+1)-th order statistics; take the
  // narrow end. Feasibility guarantees index k exists in that case.
  const double half_inv = 0.5 / gamma;
  const auto k = static_cast<std::size_t>(std::ceil(half_inv));
  const bool flat = half_inv == std::floor(half_inv);

  const double l_lo = pos[k - 1];
  const double l_hi = flat ? pos[k] : pos[k - 1];
  const double u_hi = neg[k - 1];
  const double u_lo = flat ? neg[k] : neg[k - 1];
  bool tie = l_lo < l_hi || u_lo < u_hi;

  FitReport report;
  if (l_hi <= u_lo) {
    report = finish(data, gamma, FitStatus::Converged,
                    CutoffInterval::from_bounds(l_hi, u_lo), tie);
  } else {
    const CutoffRegion region = solve_cutoff_region(data);
    tie = tie || region.tie;
    report = finish(data, gamma, FitStatus::DegenerateCutoffPoint,
                    CutoffInterval::point(region.cutoff), tie);
  }
  report.dual_objective = solve_dual_greedy(data, gamma).dual_value;
  return report;
}

FitReport solve_hard_margin(const Dataset& data) {
  require_both_classes(data);
  const auto pos = data.scores_of(kPositive);
  const auto neg = data.scores_of(kNegative);
  const double l = *std::min_element(pos.begin(), pos.end());
  const double u = *std::max_element(neg.begin(), neg.end());

  FitReport report;
  report.gamma = kInf;
  if (l <= u) {
    report.status = FitStatus::Converged;
    report.interval = CutoffInterval::from_bounds(l, u);
  } else {
    report.status = FitStatus::DegenerateCutoffPoint;
    report.interval = CutoffInterval::point(0.5 * (l + u));
    report.tie_flag = true;
  }
  report.objective = report.interval->half_width();
  return report;
}

DualSolution solve_dual_greedy(const Dataset& data, double gamma) {
  require_positive_gamma(gamma);
  require_both_classes(data);

  const auto pos = ranked_indices(data, kPositive, /*ascending=*/true);
  const auto neg = ranked_indices(data, kNegative, /*ascending=*/false);

  DualSolution dual;
  dual.gamma = gamma;
  dual.mu.assign(data.size(), 0.0);

  // Both classes have per-point capacity gamma, so the k-th cheapest positive
  // and k-th most expensive negative always fill together; the marginal cost
  // of rank k is pos_k - neg_k, non-decreasing in k.
  const std::size_t ranks = std::min(pos.size(), neg.size());
  double mass = 0.0;
  std::size_t rank = 0;
  for (; rank < ranks; ++rank) {
    const double remaining = 0.5 - static_cast<double>(rank) * gamma;
    if (remaining <= 1e-15) break;
    if (data[pos[rank]].score - data[neg[rank]].score >= 0.0) break;
    const double step = std::min(gamma, remaining);
    dual.mu[pos[rank]] = step;
    dual.mu[neg[rank]] = step;
    mass += step;
  }
  if (rank == ranks && 0.5 - mass > 1e-15) {
    // Ran out of points while still pairing profitably.
    dual.capacity_limited =
        data[pos[ranks - 1]].score < data[neg[ranks - 1]].score;
  }

  dual.alpha = std::max(0.0, 1.0 - 2.0 * mass);
  dual.lambda.resize(data.size());
  double value = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    dual.lambda[i] = gamma - dual.mu[i];
    value += dual.mu[i] * data[i].label * data[i].score;
  }
  dual.dual_value = -value;
  return dual;
}

FitReport recover_interval(const DualSolution& dual, const Dataset& data) {
  require_both_classes(data);
  const double gamma = dual.gamma;
  require_positive_gamma(gamma);
  if (dual.mu.size() != data.size()) {
    throw std::invalid_argument("dual multipliers do not match the dataset");
  }

  constexpr double kConstraintTol = 1e-10;
  double sum_mu = 0.0;
  double sum_y_mu = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double mu = dual.mu[i];
    if (mu < -kConstraintTol || mu > gamma + kConstraintTol) {
      throw std::invalid_argument("dual multiplier outside [0, gamma] at index " +
                                  std::to_string(i));
    }
    sum_mu += mu;
    sum_y_mu += data[i].label * mu;
  }
  if (dual.alpha < -kConstraintTol || std::abs(sum_y_mu) > kConstraintTol ||
      std::abs(sum_mu - (1.0 - dual.alpha)) > kConstraintTol) {
    throw std::invalid_argument("dual multipliers violate the equality constraints");
  }

  // Bracket: l in [l_lo, l_hi], u in [u_lo, u_hi].
  //   S3 positives (mu = gamma) are misclassified: r <= l.
  //   S2 positives (mu = 0) are correct or on the boundary: r >= l.
  //   S1 points sit exactly on their boundary.
  const double class_tol = 1e-9 * gamma;
  double l_lo = -kInf, l_hi = kInf, u_lo = -kInf, u_hi = kInf;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double mu = dual.mu[i];
    const double r = data[i].score;
    const bool zero = mu <= class_tol;
    const bool capped = mu >= gamma - class_tol;
    if (data[i].label == kPositive) {
      if (!capped) l_hi = std::min(l_hi, r);
      if (!zero) l_lo = std::max(l_lo, r);
    } else {
      if (!capped) u_lo = std::max(u_lo, r);
      if (!zero) u_hi = std::min(u_hi, r);
    }
  }

  FitReport report;
  report.gamma = gamma;
  report.dual_objective = dual.dual_value;
  if (l_lo > l_hi || u_lo > u_hi) return report;  // NonConvergence

  const bool alpha_active = dual.alpha > kConstraintTol;
  if (!alpha_active && l_hi <= u_lo && std::isfinite(l_hi) && std::isfinite(u_lo)) {
    const bool tie = l_lo < l_hi || u_lo < u_hi;
    report = finish(data, gamma, FitStatus::Converged,
                    CutoffInterval::from_bounds(l_hi, u_lo), tie);
  } else {
    // d = 0: the cutoff must lie in both brackets.
    const double lo = std::max(l_lo, u_lo);
    const double hi = std::min(l_hi, u_hi);
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) return report;
    report = finish(data, gamma, FitStatus::DegenerateCutoffPoint,
                    CutoffInterval::point(0.5 * (lo + hi)), lo < hi);
  }
  report.dual_objective = dual.dual_value;
  return report;
}

FitReport brute_force_oracle(const Dataset& data, double gamma,
                             std::size_t max_points) {
  require_positive_gamma(gamma);
  require_both_classes(data);
  if (data.size() > max_points) {
    throw std::invalid_argument("brute-force oracle limited to " +
                                std::to_string(max_points) + " points");
  }

  std::vector<double> scores;
  scores.reserve(data.size());
  for (const auto& item : data) scores.push_back(item.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<double> candidates = scores;
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    candidates.push_back(0.5 * (scores[i] + scores[i + 1]));
  }
  std::sort(candidates.begin(), candidates.end());

  constexpr double kTieTol = 1e-12;
  double best = kInf;
  double best_width = kInf;
  CutoffInterval best_interval;
  std::size_t n_best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i; j < candidates.size(); ++j) {
      const auto interval = CutoffInterval::from_bounds(candidates[i], candidates[j]);
      const double value = primal_objective(data, interval, gamma);
      const double width = candidates[j] - candidates[i];
      if (value < best - kTieTol) {
        best = value;
        best_width = width;
        best_interval = interval;
        n_best = 1;
      } else if (value <= best + kTieTol) {
        ++n_best;
        if (width < best_width) {
          best_width = width;
          best_interval = interval;
          best = std::min(best, value);
        }
      }
    }
  }

  const bool degenerate = best_interval.lower() == best_interval.upper();
  FitReport report = finish(
      data, gamma,
      degenerate ? FitStatus::DegenerateCutoffPoint : FitStatus::Converged,
      best_interval, n_best > 1);
  return report;
}

KktReport verify_kkt(const Dataset& data, double gamma, const FitReport& primal,
                     const DualSolution& dual, double tol) {
  if (!primal.converged() || !primal.interval || !primal.objective) {
    throw std::invalid_argument("KKT check needs a converged primal solution");
  }
  if (dual.mu.size() != data.size() || dual.lambda.size() != data.size()) {
    throw std::invalid_argument("dual multipliers do not match the dataset");
  }

  const double c = primal.interval->center();
  const double d = primal.interval->half_width();

  KktReport report;
  double sum_mu = 0.0;
  double sum_y_mu = 0.0;
  double xi_residual = 0.0;
  double dual_violation = std::max(0.0, -dual.alpha);
  double slack = std::abs(dual.alpha * d);
  double primal_violation = std::max(0.0, -d);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data[i].label;
    const double margin = y * (data[i].score - c);
    const double xi = std::max(0.0, -margin - d);
    const double a = margin + d + xi;
    const double mu = dual.mu[i];
    const double lambda = dual.lambda[i];

    sum_mu += mu;
    sum_y_mu += mu * y;
    xi_residual = std::max(xi_residual, std::abs(gamma - lambda - mu));
    dual_violation = std::max({dual_violation, -mu, -lambda});
    primal_violation = std::max({primal_violation, -xi, -a});
    slack = std::max({slack, std::abs(lambda * xi), std::abs(mu * a)});
  }

  report.stationarity_residuals = {std::abs(sum_y_mu),
                                   std::abs(1.0 - dual.alpha - sum_mu), xi_residual};
  report.primal_feasibility_violation = primal_violation;
  report.dual_feasibility_violation = dual_violation;
  report.slackness_violation = slack;
  report.duality_gap = std::abs(*primal.objective - dual.dual_value);
  report.pass = report.stationarity_residuals[0] <= tol &&
                report.stationarity_residuals[1] <= tol &&
                report.stationarity_residuals[2] <= tol &&
                report.primal_feasibility_violation <= tol &&
                report.dual_feasibility_violation <= tol &&
                report.slackness_violation <= tol && report.duality_gap <= tol;
  return report;
}

}  // namespace riskcut
