#include "dro/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace dro {

CostFunction CostFunction::lq(double q, double power) {
  if (q < 1.0) throw std::invalid_argument("CostFunction: q must be >= 1");
  if (power < 1.0) throw std::invalid_argument("CostFunction: power must be >= 1");
  CostFunction c(CostKind::lq, power);
  c.q_ = q;
  return c;
}

CostFunction CostFunction::mahalanobis(PsdMatrix lambda, double power) {
  if (power < 1.0) throw std::invalid_argument("CostFunction: power must be >= 1");
  CostFunction c(CostKind::mahalanobis, power);
  c.lambda_ = std::move(lambda);
  return c;
}

CostFunction CostFunction::mahalanobis_feature(PsdMatrix lambda, FeatureMap map,
                                               double power) {
  if (lambda.dim() != map.output_dim()) {
    throw std::invalid_argument(
        "CostFunction: Lambda dimension must match the feature map output");
  }
  CostFunction c(CostKind::mahalanobis_feature, power);
  c.lambda_ = std::move(lambda);
  c.map_ = std::move(map);
  return c;
}

double CostFunction::operator()(const Atom& w, const Atom& w2) const {
  if (w.y != w2.y) return kInfCost;
  return feature_cost(w.x, w2.x);
}

double CostFunction::feature_cost(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& x2) const {
  if (x.size() != x2.size()) {
    throw std::invalid_argument("CostFunction: dimension mismatch");
  }
  double dist = 0.0;
  switch (kind_) {
    case CostKind::lq: {
      const Eigen::ArrayXd a = (x - x2).array().abs();
      dist = std::isinf(q_) ? a.maxCoeff() : std::pow(a.pow(q_).sum(), 1.0 / q_);
      break;
    }
    case CostKind::mahalanobis:
      dist = mahalanobis_dist(*lambda_, x, x2);
      break;
    case CostKind::mahalanobis_feature:
      dist = mahalanobis_dist(*lambda_, (*map_)(x), (*map_)(x2));
      break;
  }
  return power_ == 2.0 ? dist * dist : std::pow(dist, power_);
}

Eigen::VectorXd CostFunction::feature_cost_batch(const Eigen::MatrixXd& u,
                                                 const Eigen::VectorXd& x) const {
  if (u.rows() != x.size()) {
    throw std::invalid_argument("CostFunction: dimension mismatch");
  }
  Eigen::VectorXd dist2(u.cols());
  switch (kind_) {
    case CostKind::lq: {
      if (q_ == 2.0) {
        dist2 = (u.colwise() - x).colwise().squaredNorm();
      } else {
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
          const Eigen::ArrayXd a = (u.col(k) - x).array().abs();
          const double d = std::isinf(q_) ? a.maxCoeff() : std::pow(a.pow(q_).sum(), 1.0 / q_);
          dist2(k) = d * d;
        }
      }
      break;
    }
    case CostKind::mahalanobis: {
      const Eigen::MatrixXd diff = u.colwise() - x;
      dist2 = (diff.array() * (lambda_->matrix() * diff).array()).colwise().sum();
      break;
    }
    case CostKind::mahalanobis_feature: {
      const Eigen::VectorXd zx = (*map_)(x);
      for (Eigen::Index k = 0; k < u.cols(); ++k) {
        const double d = mahalanobis_dist(*lambda_, (*map_)(u.col(k)), zx);
        dist2(k) = d * d;
      }
      break;
    }
  }
  dist2 = dist2.cwiseMax(0.0);
  if (power_ == 2.0) return dist2;
  return dist2.array().pow(power_ / 2.0);
}

}  // namespace dro
