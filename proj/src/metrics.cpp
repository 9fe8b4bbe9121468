#include "riskcut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "riskcut/solver.hpp"

namespace riskcut {
namespace {

RcCurve assemble_curve(std::vector<RcPoint> raw) {
  std::stable_sort(raw.begin(), raw.end(), [](const RcPoint& a, const RcPoint& b) {
    return a.coverage < b.coverage || (a.coverage == b.coverage && a.risk < b.risk);
  });
  RcCurve curve;
  for (const auto& p : raw) {
    if (!curve.points.empty() && curve.points.back().coverage == p.coverage) continue;
    curve.points.push_back(p);
  }
  curve.extrapolated_origin = !curve.points.empty() && curve.points.front().coverage > 0.0;
  return curve;
}

}  // namespace

IntervalEvaluation evaluate_interval(const Dataset& data, const CutoffInterval& interval) {
  if (data.empty()) throw DataError("cannot evaluate an interval on empty data");
  const double c = interval.center();
  IntervalEvaluation eval;
  std::size_t forced_correct = 0;
  for (const auto& [y, r] : data) {
    const Decision decision = decide(interval, r);
    if (decision != Decision::Abstain) {
      ++eval.n_covered;
      if (static_cast<int>(decision) != y) ++eval.n_errors_covered;
    }
    if ((r > c && y == kPositive) || (r < c && y == kNegative)) ++forced_correct;
  }
  const auto n = static_cast<double>(data.size());
  eval.coverage = static_cast<double>(eval.n_covered) / n;
  eval.acc_all = static_cast<double>(forced_correct) / n;
  if (eval.n_covered > 0) {
    eval.selective_risk = static_cast<double>(eval.n_errors_covered) /
                          static_cast<double>(eval.n_covered);
    // Same form as acc_all so the two agree bitwise at full coverage.
    eval.acc_nonreject = static_cast<double>(eval.n_covered - eval.n_errors_covered) /
                         static_cast<double>(eval.n_covered);
  }
  return eval;
}

std::vector<SweepRow> gamma_sweep(const Dataset& data, std::span<const double> grid) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const double gamma : grid) {
    SweepRow row;
    row.gamma = gamma;
    row.fit = solve_interval(data, gamma);
    if (row.fit.converged()) row.evaluation = evaluate_interval(data, *row.fit.interval);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> auto_gamma_grid(const Dataset& data, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  const double lo = 1.01 * feasibility_bound(data);
  const double hi = std::max(1.0, 2.0 * lo);
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(step * static_cast<double>(i));
  }
  grid.back() = hi;
  return grid;
}

RcCurve rc_curve(const Dataset& data) {
  require_both_classes(data);
  auto pos = data.scores_of(kPositive);
  auto neg = data.scores_of(kNegative);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  std::vector<RcPoint> raw;
  auto add_point = [&](const CutoffInterval& interval, std::optional<double> gamma,
                       std::size_t k) {
    const IntervalEvaluation eval = evaluate_interval(data, interval);
    if (!eval.selective_risk) return;
    raw.push_back({eval.coverage, *eval.selective_risk, gamma, k, interval});
  };

  add_point(CutoffInterval::point(solve_cutoff_region(data).cutoff), std::nullopt, 0);
  const std::size_t ranks = std::min(pos.size(), neg.size());
  for (std::size_t k = 1; k <= ranks; ++k) {
    if (pos[k - 1] > neg[k - 1]) continue;
    // Any gamma with ceil(1/(2 gamma)) = k selects rank k; 1/(2 gamma) = k - 1/2
    // sits in the middle of that range.
    const double gamma = 1.0 / (2.0 * static_cast<double>(k) - 1.0);
    add_point(CutoffInterval::from_bounds(pos[k - 1], neg[k - 1]), gamma, k);
  }

  if (raw.empty()) throw DataError("no solution of the interval problem covers any point");
  return assemble_curve(std::move(raw));
}

RcCurve evaluate_curve(const RcCurve& fitted, const Dataset& data) {
  std::vector<RcPoint> raw;
  for (const auto& p : fitted.points) {
    const IntervalEvaluation eval = evaluate_interval(data, p.interval);
    if (!eval.selective_risk) continue;
    raw.push_back({eval.coverage, *eval.selective_risk, p.gamma, p.rank_k, p.interval});
  }
  if (raw.empty()) throw DataError("no interval of the curve covers any point");
  return assemble_curve(std::move(raw));
}

double aurc(const RcCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty risk-coverage curve");
  const auto& pts = curve.points;
  double area = pts.front().risk * pts.front().coverage;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += 0.5 * (pts[i].risk + pts[i - 1].risk) * (pts[i].coverage - pts[i - 1].coverage);
  }
  area += pts.back().risk * (1.0 - pts.back().coverage);
  return std::clamp(area, 0.0, 1.0);
}

double roc_auc(const Dataset& data) {
  require_both_classes(data);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data[a].score < data[b].score; });

  // Mann-Whitney U from mid-ranks.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && data[order[j]].score == data[order[i]].score) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (data[order[t]].label == kPositive) positive_rank_sum += mid_rank;
    }
    i = j;
  }
  const auto n_pos = static_cast<double>(data.count_positive());
  const auto n_neg = static_cast<double>(data.count_negative());
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace riskcut
