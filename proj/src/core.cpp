#include "riskcut/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace riskcut {

Dataset::Dataset(std::vector<LabeledScore> items) {
  items_.reserve(items.size());
  for (const auto& item : items) add(item.label, item.score);
}

Dataset::Dataset(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw DataError("label and score sequences differ in length");
  }
  items_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) add(labels[i], scores[i]);
}

void Dataset::add(int label, double score) {
  if (label != kPositive && label != kNegative) {
    throw DataError("label must be -1 or +1, got " + std::to_string(label));
  }
  if (!std::isfinite(score)) throw DataError("score must be finite");
  items_.push_back({label, score});
  if (label == kPositive) ++n_positive_;
}

std::vector<double> Dataset::scores_of(int label) const {
  std::vector<double> out;
  out.reserve(label == kPositive ? count_positive() : count_negative());
  for (const auto& item : items_) {
    if (item.label == label) out.push_back(item.score);
  }
  return out;
}

void require_both_classes(const Dataset& data) {
  if (data.count_positive() == 0 || data.count_negative() == 0) {
    throw DataError("dataset needs at least one positive and one negative");
  }
}

CutoffInterval CutoffInterval::from_bounds(double lower, double upper) {
  if (!(lower <= upper)) {
    throw std::invalid_argument("interval lower bound exceeds upper bound");
  }
  return CutoffInterval(lower, upper);
}

CutoffInterval CutoffInterval::from_center(double center, double half_width) {
  if (!(half_width >= 0.0)) {
    throw std::invalid_argument("half-width must be non-negative");
  }
  return CutoffInterval(center - half_width, center + half_width);
}

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged:
      return "Converged";
    case FitStatus::DegenerateCutoffPoint:
      return "DegenerateCutoffPoint";
    case FitStatus::NonConvergence:
      return "NonConvergence";
  }
  return "Unknown";
}

double primal_objective(const Dataset& data, double center, double half_width,
                        double gamma) {
  double hinge = 0.0;
  for (const auto& [y, r] : data) {
    hinge += std::max(0.0, -y * (r - center) - half_width);
  }
  return half_width + gamma * hinge;
}

double primal_objective(const Dataset& data, const CutoffInterval& interval,
                        double gamma) {
  const double l = interval.lower();
  const double u = interval.upper();
  double hinge = 0.0;
  for (const auto& [y, r] : data) {
    hinge += y == kPositive ? std::max(0.0, l - r) : std::max(0.0, r - u);
  }
  return 0.5 * (u - l) + gamma * hinge;
}

double empirical_risk_01(const Dataset& data, double center, double half_width) {
  if (data.empty()) throw DataError("empirical risk of an empty dataset");
  // y (r - c) <= -d written against the bounds, so boundary points compare
  // exactly as they do in decide().
  const double lower = center - half_width;
  const double upper = center + half_width;
  std::size_t errors = 0;
  for (const auto& [y, r] : data) {
    if (y == kPositive ? r <= lower : r >= upper) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

}  // namespace riskcut
