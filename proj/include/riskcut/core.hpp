#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskcut {

/// Raised for malformed or unusable input data (missing class, bad label,
/// non-finite score, empty dataset).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kPositive = +1;
inline constexpr int kNegative = -1;

/// A binary label in {-1, +1} paired with a finite risk score.
struct LabeledScore {
  int label;
  double score;
};

/// Ordered collection of labeled scores. Labels and finiteness are checked on
/// insertion; class balance is checked by the solvers that need it.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledScore> items);
  Dataset(std::span<const int> labels, std::span<const double> scores);

  void add(int label, double score);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const LabeledScore& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<LabeledScore>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::size_t count_positive() const { return n_positive_; }
  std::size_t count_negative() const { return items_.size() - n_positive_; }

  /// Scores of one class in dataset order.
  std::vector<double> scores_of(int label) const;

 private:
  std::vector<LabeledScore> items_;
  std::size_t n_positive_ = 0;
};

/// Throws DataError unless both labels are present.
void require_both_classes(const Dataset& data);

/// Abstention interval [lower, upper] = [c - d, c + d].
///
/// The bounds are stored directly so that interval endpoints read off data
/// points compare exactly against those points; center and half-width are
/// derived.
class CutoffInterval {
 public:
  CutoffInterval() = default;

  static CutoffInterval from_bounds(double lower, double upper);
  static CutoffInterval from_center(double center, double half_width);
  static CutoffInterval point(double cutoff) { return from_bounds(cutoff, cutoff); }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double center() const { return 0.5 * (lower_ + upper_); }
  double half_width() const { return 0.5 * (upper_ - lower_); }

  friend bool operator==(const CutoffInterval&, const CutoffInterval&) = default;

 private:
  CutoffInterval(double lower, double upper) : lower_(lower), upper_(upper) {}
  double lower_ = 0.0;
  double upper_ = 0.0;
};

enum class Decision : int { Negative = -1, Abstain = 0, Positive = 1 };

enum class FitStatus { Converged, DegenerateCutoffPoint, NonConvergence };

const char* to_string(FitStatus status);

/// Result of fitting the cutoff interval for one penalty level.
struct FitReport {
  double gamma = 0.0;
  FitStatus status = FitStatus::NonConvergence;
  std::optional<CutoffInterval> interval;
  std::optional<double> objective;
  std::optional<double> dual_objective;
  bool tie_flag = false;

  bool converged() const { return status != FitStatus::NonConvergence; }
};

/// Ternary decision: abstain on the closed interval [c - d, c + d].
inline Decision decide(const CutoffInterval& interval, double score) {
  if (score < interval.lower()) return Decision::Negative;
  if (score > interval.upper()) return Decision::Positive;
  return Decision::Abstain;
}

/// d + gamma * sum_i max(0, -y_i (r_i - c) - d).
double primal_objective(const Dataset& data, double center, double half_width,
                        double gamma);

/// Same objective expressed through bounds: (u - l)/2 + gamma * hinge terms.
double primal_objective(const Dataset& data, const CutoffInterval& interval,
                        double gamma);

/// Fraction of points with y_i (r_i - c) <= -d. The inequality is closed, so
/// a point sitting exactly on the interval boundary on its wrong side counts
/// as an error even though decide() abstains on it.
double empirical_risk_01(const Dataset& data, double center, double half_width);

}  // namespace riskcut
