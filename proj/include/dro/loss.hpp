#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace dro {

/// Pointwise losses l(u, y, beta) used by the duality-based solver.
enum class LossKind { logistic, quadratic };

/// log(1 + exp(-m)) without overflow.
inline double log1pexp_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

inline double point_loss(LossKind kind, const Eigen::VectorXd& u, double y,
                         const Eigen::VectorXd& beta) {
  const double s = beta.dot(u);
  if (kind == LossKind::logistic) return log1pexp_neg(y * s);
  const double e = y - s;
  return e * e;
}

inline Eigen::VectorXd point_loss_grad_beta(LossKind kind, const Eigen::VectorXd& u,
                                            double y, const Eigen::VectorXd& beta) {
  const double s = beta.dot(u);
  if (kind == LossKind::logistic) {
    const double m = y * s;
    const double sig = 1.0 / (1.0 + std::exp(m));  // sigmoid(-m)
    return -y * sig * u;
  }
  return -2.0 * (y - s) * u;
}

/// Mean logistic loss of a linear score over a data block.
inline double mean_log_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& beta) {
  const Eigen::VectorXd margins = y.array() * (x * beta).array();
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += log1pexp_neg(margins(i));
  return total / static_cast<double>(margins.size());
}

}  // namespace dro
