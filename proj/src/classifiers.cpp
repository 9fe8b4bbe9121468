#include "riskcut/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "riskcut/core.hpp"

namespace riskcut {
namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd with_intercept_column(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

double log_normal_density(double x, double mean, double variance) {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + z * z / variance);
}

}  // namespace

FeatureMatrix FeatureMatrix::subset(const std::vector<bool>& keep) const {
  if (keep.size() != static_cast<std::size_t>(x.rows())) {
    throw std::invalid_argument("subset mask does not match the row count");
  }
  const auto n_keep = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));
  FeatureMatrix out;
  out.x.resize(n_keep, x.cols());
  out.y.resize(n_keep);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    out.x.row(row) = x.row(i);
    out.y(row) = y(i);
    ++row;
  }
  return out;
}

void validate(const FeatureMatrix& data, bool require_both) {
  if (data.x.rows() != data.y.size()) throw DataError("feature rows and labels differ in length");
  if (data.x.rows() == 0) throw DataError("empty feature matrix");
  if (!data.x.allFinite()) throw DataError("features must be finite");
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y(i) != kPositive && data.y(i) != kNegative) {
      throw DataError("labels must be -1 or +1");
    }
    if (data.y(i) == kPositive) ++n_pos;
  }
  if (require_both && (n_pos == 0 || n_pos == data.y.size())) {
    throw DataError("both labels must be present");
  }
}

double logistic_loss(const FeatureMatrix& data, const Eigen::VectorXd& weights, double intercept,
                     double ridge) {
  const Eigen::VectorXd eta = (data.x * weights).array() + intercept;
  double loss = 0.5 * ridge * weights.squaredNorm();
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    loss += softplus(eta(i)) - (data.y(i) == kPositive ? eta(i) : 0.0);
  }
  return loss;
}

LinearModel fit_logistic(const FeatureMatrix& data, double ridge, std::size_t max_iter,
                         double tol) {
  validate(data);
  if (ridge < 0.0) throw std::invalid_argument("ridge must be non-negative");

  const Eigen::MatrixXd design = with_intercept_column(data.x);
  const Eigen::Index dim = design.cols();
  const Eigen::VectorXd target =
      (data.y.array() == kPositive).cast<double>().matrix();
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(dim, ridge);
  penalty(0) = 0.0;

  auto loss_of = [&](const Eigen::VectorXd& beta) {
    return logistic_loss(data, beta.tail(dim - 1), beta(0), ridge);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
  LinearModel model;
  model.kind = ModelKind::Logistic;
  double loss = loss_of(beta);
  model.info.trace.push_back(loss);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd eta = design * beta;
    const Eigen::VectorXd p = eta.unaryExpr([](double v) { return expit(v); });
    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).max(1e-12);
    const Eigen::VectorXd gradient =
        design.transpose() * (target - p) - penalty.cwiseProduct(beta);
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal() += penalty;

    const Eigen::LDLT<Eigen::MatrixXd> solver(hessian);
    if (solver.info() != Eigen::Success || !solver.isPositive()) {
      throw std::runtime_error("logistic regression: singular weighted normal equations");
    }
    Eigen::VectorXd step = solver.solve(gradient);
    if (!step.allFinite()) {
      throw std::runtime_error("logistic regression: singular weighted normal equations");
    }

    // Halve the Newton step until the loss does not increase.
    Eigen::VectorXd candidate = beta + step;
    double candidate_loss = loss_of(candidate);
    for (int halving = 0; halving < 30 && candidate_loss > loss; ++halving) {
      step *= 0.5;
      candidate = beta + step;
      candidate_loss = loss_of(candidate);
    }
    beta = candidate;
    loss = std::min(loss, candidate_loss);
    model.info.trace.push_back(loss);
    model.info.iterations = iter + 1;
    if (step.cwiseAbs().maxCoeff() <= tol) {
      model.info.converged = true;
      break;
    }
  }

  model.intercept = beta(0);
  model.weights = beta.tail(dim - 1);
  model.info.objective = loss;
  return model;
}

double svm_objective(const FeatureMatrix& data, const Eigen::VectorXd& weights, double intercept,
                     double cost) {
  const Eigen::VectorXd margins =
      data.y.cast<double>().cwiseProduct((data.x * weights).array().matrix()) +
      data.y.cast<double>() * intercept;
  return 0.5 * weights.squaredNorm() + cost * (1.0 - margins.array()).max(0.0).sum();
}

LinearModel fit_linear_svm(const FeatureMatrix& data, double cost, std::size_t max_epochs,
                           double tol) {
  validate(data);
  if (!(cost > 0.0)) throw std::invalid_argument("cost must be positive");

  const Eigen::Index n = data.x.rows();
  const Eigen::VectorXd y = data.y.cast<double>();
  const Eigen::VectorXd sq_norms = data.x.rowwise().squaredNorm();
  constexpr double kTau = 1e-12;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(data.x.cols());
  // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j x_i'x_j.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  auto in_up = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) < cost) || (y(t) < 0 && alpha(t) > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < cost);
  };
  auto dual_objective = [&] { return alpha.sum() - 0.5 * w.squaredNorm(); };

  LinearModel model;
  model.kind = ModelKind::LinearSvm;
  const std::size_t max_updates = max_epochs * static_cast<std::size_t>(n);
  std::size_t updates = 0;
  // Samples as columns, so each one is contiguous.
  const Eigen::MatrixXd xt = data.x.transpose();

  // i maximizes -y G over I_up. All gradients start at -1, so any member
  // of I_up (every positive) ties; it is refreshed with each gradient update.
  Eigen::Index i = -1;
  Eigen::VectorXd proj(n);
  for (Eigen::Index t = 0; t < n && i < 0; ++t) {
    if (in_up(t)) i = t;
  }

  for (; updates < max_updates; ++updates) {
    // Second-order selection of j: the largest guaranteed objective decrease
    // over I_low.
    Eigen::Index j = -1;
    const double g_max = i >= 0 ? -y(i) * grad(i) : -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    if (i >= 0) {
      double best_gain = std::numeric_limits<double>::infinity();
      proj.noalias() = data.x * xt.col(i);
      for (Eigen::Index t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        const double v = -y(t) * grad(t);
        g_min = std::min(g_min, v);
        const double b = g_max - v;
        if (b <= 0.0) continue;
        double a = sq_norms(i) + sq_norms(t) - 2.0 * proj(t);
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || g_max - g_min < tol) {
      model.info.converged = true;
      break;
    }

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double k_ij = xt.col(i).dot(xt.col(j));
    if (y(i) != y(j)) {
      double quad = sq_norms(i) + sq_norms(j) - 2.0 * k_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) { alpha(j) = 0.0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0.0) { alpha(i) = 0.0; alpha(j) = -diff; }
      }
      if (diff > 0.0) {
        if (alpha(i) > cost) { alpha(i) = cost; alpha(j) = cost - diff; }
      } else {
        if (alpha(j) > cost) { alpha(j) = cost; alpha(i) = cost + diff; }
      }
    } else {
      double quad = sq_norms(i) + sq_norms(j) - 2.0 * k_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > cost) {
        if (alpha(i) > cost) { alpha(i) = cost; alpha(j) = sum - cost; }
        if (alpha(j) > cost) { alpha(j) = cost; alpha(i) = sum - cost; }
      } else {
        if (alpha(j) < 0.0) { alpha(j) = 0.0; alpha(i) = sum; }
        if (alpha(i) < 0.0) { alpha(i) = 0.0; alpha(j) = sum; }
      }
    }

    const Eigen::VectorXd dw = (alpha(i) - old_i) * y(i) * xt.col(i) +
                               (alpha(j) - old_j) * y(j) * xt.col(j);
    w += dw;
    proj.noalias() = data.x * dw;
    i = -1;
    double next_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      grad(t) += y(t) * proj(t);
      const double v = -y(t) * grad(t);
      if (v > next_max && in_up(t)) {
        next_max = v;
        i = t;
      }
    }

    if ((updates + 1) % static_cast<std::size_t>(n) == 0) {
      model.info.trace.push_back(dual_objective());
    }
  }
  model.info.iterations = updates;
  model.info.trace.push_back(dual_objective());

  // Intercept from free vectors, else the midpoint of the feasible range.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= cost) {
      if (y(t) < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (alpha(t) <= 0.0) {
      if (y(t) > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (upper + lower);

  model.weights = w;
  model.intercept = -rho;
  model.info.objective = svm_objective(data, model.weights, model.intercept, cost);
  return model;
}

GaussianNaiveBayes fit_gaussian_nb(const FeatureMatrix& data) {
  validate(data);
  const Eigen::Index p = data.x.cols();
  GaussianNaiveBayes model;
  model.means_ = Eigen::MatrixXd::Zero(2, p);
  model.variances_ = Eigen::MatrixXd::Zero(2, p);
  Eigen::Vector2d counts = Eigen::Vector2d::Zero();

  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const Eigen::Index k = data.y(i) == kPositive ? 1 : 0;
    model.means_.row(k) += data.x.row(i);
    counts(k) += 1.0;
  }
  model.means_.row(0) /= counts(0);
  model.means_.row(1) /= counts(1);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const Eigen::Index k = data.y(i) == kPositive ? 1 : 0;
    model.variances_.row(k) += (data.x.row(i) - model.means_.row(k)).array().square().matrix();
  }
  model.variances_.row(0) /= counts(0);
  model.variances_.row(1) /= counts(1);
  model.variances_ = model.variances_.cwiseMax(1e-9);
  model.log_prior_ratio_ = std::log(counts(1) / counts(0));
  return model;
}

double GaussianNaiveBayes::score(const Eigen::Ref<const Eigen::VectorXd>& row) const {
  if (row.size() != means_.cols()) throw std::invalid_argument("feature dimension mismatch");
  double log_odds = log_prior_ratio_;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    log_odds += log_normal_density(row(j), means_(1, j), variances_(1, j)) -
                log_normal_density(row(j), means_(0, j), variances_(0, j));
  }
  return log_odds;
}

Eigen::VectorXd GaussianNaiveBayes::scores(const Eigen::MatrixXd& rows) const {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out(i) = score(rows.row(i).transpose());
  return out;
}

double predict_score(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& row) {
  if (row.size() != model.weights.size()) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  return model.weights.dot(row) + model.intercept;
}

Eigen::VectorXd predict_scores(const LinearModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.weights.size()) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  return (rows * model.weights).array() + model.intercept;
}

double predict_probability(const LinearModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& row) {
  return expit(predict_score(model, row));
}

LinearModel normalize_params(const LinearModel& model) {
  const double norm = model.weights.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a zero weight vector");
  LinearModel out = model;
  out.weights /= norm;
  out.intercept /= norm;
  for (Eigen::Index j = 0; j < out.weights.size(); ++j) {
    if (out.weights(j) == 0.0) continue;
    if (out.weights(j) < 0.0) {
      out.weights = -out.weights;
      out.intercept = -out.intercept;
    }
    break;
  }
  return out;
}

}  // namespace riskcut
