#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace riskcut {

/// n x p covariates with labels in {-1, +1}.
struct FeatureMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }

  /// Rows whose mask entry is true, in order.
  FeatureMatrix subset(const std::vector<bool>& keep) const;
};

/// Throws DataError on shape mismatch, non-finite values, labels outside
/// {-1, +1}, or (when require_both) a missing class.
void validate(const FeatureMatrix& data, bool require_both = true);

enum class ModelKind { Logistic, LinearSvm, GaussianNB };

struct FitInfo {
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  /// Logistic: penalized negative log-likelihood per iteration.
  /// SVM: dual objective after each sweep of n pair updates (non-decreasing).
  std::vector<double> trace;
};

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  ModelKind kind = ModelKind::Logistic;
  FitInfo info;
};

/// Ridge-stabilized logistic regression by iteratively reweighted least
/// squares. The intercept is not penalized. Stops when the largest parameter
/// change is <= tol or after max_iter Newton steps.
LinearModel fit_logistic(const FeatureMatrix& data, double ridge = 1e-8,
                         std::size_t max_iter = 100, double tol = 1e-10);

/// Penalized negative log-likelihood minimized by fit_logistic.
double logistic_loss(const FeatureMatrix& data, const Eigen::VectorXd& weights,
                     double intercept, double ridge);

/// Soft-margin linear SVM, 1/2 |w|^2 + cost * sum hinge(y (w'x + b)), solved
/// exactly in the dual by sequential minimal optimization with second-order
/// working set selection. Deterministic. tol bounds the KKT violation;
/// at most max_epochs * n pair updates are made.
LinearModel fit_linear_svm(const FeatureMatrix& data, double cost = 1.0,
                           std::size_t max_epochs = 1000, double tol = 1e-3);

double svm_objective(const FeatureMatrix& data, const Eigen::VectorXd& weights,
                     double intercept, double cost);

/// Gaussian naive Bayes; score is the posterior log-odds of the positive class.
class GaussianNaiveBayes {
 public:
  double score(const Eigen::Ref<const Eigen::VectorXd>& row) const;
  Eigen::VectorXd scores(const Eigen::MatrixXd& rows) const;

  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::MatrixXd& variances() const { return variances_; }
  double log_prior_ratio() const { return log_prior_ratio_; }

 private:
  friend GaussianNaiveBayes fit_gaussian_nb(const FeatureMatrix& data);
  Eigen::MatrixXd means_;      // 2 x p, row 0 negative, row 1 positive
  Eigen::MatrixXd variances_;  // 2 x p
  double log_prior_ratio_ = 0.0;
};

/// Variances below 1e-9 are floored.
GaussianNaiveBayes fit_gaussian_nb(const FeatureMatrix& data);

/// w'x + b; throws std::invalid_argument on dimension mismatch.
double predict_score(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& row);
Eigen::VectorXd predict_scores(const LinearModel& model, const Eigen::MatrixXd& rows);

/// expit(w'x + b).
double predict_probability(const LinearModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& row);

/// (w, b) / |w|, signed so that the first nonzero weight is positive.
LinearModel normalize_params(const LinearModel& model);

}  // namespace riskcut
