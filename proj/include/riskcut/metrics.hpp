#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "riskcut/core.hpp"

namespace riskcut {

struct IntervalEvaluation {
  double coverage = 0.0;
  std::optional<double> selective_risk;  // absent when nothing is covered
  std::optional<double> acc_nonreject;
  double acc_all = 0.0;  // forced sign(r - c) over all points, r == c is an error
  std::size_t n_covered = 0;
  std::size_t n_errors_covered = 0;
};

struct RcPoint {
  double coverage = 0.0;
  double risk = 0.0;
  std::optional<double> gamma;
  std::optional<std::size_t> rank_k;
  CutoffInterval interval;
};

struct RcCurve {
  std::vector<RcPoint> points;  // ascending, distinct coverages
  bool extrapolated_origin = false;
};

struct SweepRow {
  double gamma = 0.0;
  FitReport fit;
  std::optional<IntervalEvaluation> evaluation;  // absent on NonConvergence
};

IntervalEvaluation evaluate_interval(const Dataset& data, const CutoffInterval& interval);

/// One fit + evaluation per grid value, in grid order.
std::vector<SweepRow> gamma_sweep(const Dataset& data, std::span<const double> grid);

/// Log-spaced grid from just above the feasibility bound to 1 (the penalty
/// beyond which the solution no longer changes).
std::vector<double> auto_gamma_grid(const Dataset& data, std::size_t points = 50);

/// Every distinct solution of the interval problem, enumerated by quantile
/// rank k = 0..min(n+, n-); k = 0 is the d = 0 cutoff point. Crossed ranks and
/// solutions that cover no point are skipped; equal coverages keep the lowest
/// risk.
RcCurve rc_curve(const Dataset& data);

/// Re-evaluates the intervals of a fitted curve on other data (for example a
/// holdout set), with the same sorting and de-duplication as rc_curve.
RcCurve evaluate_curve(const RcCurve& fitted, const Dataset& data);

/// Area under risk over coverage in [0, 1] by trapezoids, continuing the
/// end-point risks as constants outside the observed coverage range.
double aurc(const RcCurve& curve);

/// P(random positive outscores random negative), ties count one half.
double roc_auc(const Dataset& data);

}  // namespace riskcut
