#pragma once

#include <optional>
#include <string>

#include "dro/dataset.hpp"
#include "dro/linalg.hpp"
#include "dro/loss.hpp"

namespace dro {

enum class RobustLoss { sqrt_least_squares, logistic };

/// Adaptive-regularization estimation problem: loss kind, strictly PD cost
/// matrix Lambda, and uncertainty radius delta.
struct AdaptiveRegProblem {
  RobustLoss loss = RobustLoss::logistic;
  PsdMatrix lambda;
  double delta = 0.0;

  AdaptiveRegProblem(RobustLoss l, PsdMatrix lam, double d)
      : loss(l), lambda(std::move(lam)), delta(d) {
    if (delta < 0) throw std::invalid_argument("AdaptiveRegProblem: delta < 0");
    if (!lambda.certified_invertible()) {
      throw std::invalid_argument("AdaptiveRegProblem: Lambda must be strictly PD");
    }
  }
};

struct Estimate {
  Eigen::VectorXd beta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double duality_gap_bound = 0.0;
};

/// Change of variables beta = L theta with Lambda = L L^T, so that the dual
/// norm ||beta||_{Lambda^{-1}} becomes the plain l2 norm of theta and scores
/// are preserved: (L^T x)^T theta == x^T beta.
struct Whitened {
  Eigen::MatrixXd x;  // rows are L^T x_i
  Eigen::MatrixXd back;  // beta = back * theta

  Eigen::VectorXd back_map(const Eigen::VectorXd& theta) const { return back * theta; }
};

Whitened whiten(const PsdMatrix& lambda, const Eigen::MatrixXd& x);

/// min over beta of mean log-loss + delta * ||beta||_{Lambda^{-1}}, solved by
/// proximal gradient in whitened coordinates (block soft-threshold prox).
Estimate solve_adaptive_logistic(const AdaptiveRegProblem& problem, const Dataset& data);

/// min over beta of sqrt(mean squared residual) + sqrt(delta) *
/// ||beta||_{Lambda^{-1}}, solved by subgradient descent with Polyak-style
/// decaying target-level steps and best-iterate tracking.
Estimate solve_adaptive_sqrt_ls(const AdaptiveRegProblem& problem, const Dataset& data);

struct Penalty {
  enum class Kind { none, l1 } kind = Kind::none;
  double delta = 0.0;
  static Penalty none() { return {}; }
  static Penalty l1(double delta) { return {Kind::l1, delta}; }
};

/// Plain / l1-regularized logistic regression baselines. The unpenalized fit
/// reports converged=false when it hits the iteration cap (separable data).
Estimate solve_baseline_logistic(const Dataset& data, const Penalty& penalty);

/// Closed-form worst-case expected loss over the delta-ball at a fixed beta:
/// (RMSE + sqrt(delta)*||beta||_{Lambda^{-1}})^2 for the squared loss and
/// mean log-loss + delta*||beta||_{Lambda^{-1}} for the logistic loss.
double worst_case_loss(const Eigen::VectorXd& beta, const AdaptiveRegProblem& problem,
                       const Dataset& data);

/// Ordinary least squares (the quadratic-loss empirical risk minimizer).
Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// A fitted estimate plus the context needed to reuse it: loss name, radius,
/// where Lambda came from, and the CLI model that produced it.
struct EstimateRecord {
  Estimate estimate;
  std::string loss;
  double delta = 0.0;
  std::string lambda_source;
  std::string model;
};

std::string estimate_record_to_json(const EstimateRecord& record);
EstimateRecord estimate_record_from_json(const std::string& text);

}  // namespace dro
