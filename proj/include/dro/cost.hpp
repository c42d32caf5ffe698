#pragma once

#include <limits>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "dro/feature_map.hpp"
#include "dro/linalg.hpp"

namespace dro {

/// A labeled point (x, y). The label is the component the adversary may never
/// perturb: every ground cost below is +inf across differing labels.
struct Atom {
  Eigen::VectorXd x;
  double y = 0.0;
};

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

enum class CostKind { lq, mahalanobis, mahalanobis_feature };

/// Ground transport cost c((x,y),(x',y')) = dist(x,x')^power on matching
/// labels and +inf otherwise. `power` is the Wasserstein order of the cost;
/// the squared forms used for estimation are power 2, and power 1 gives the
/// order-1 Mahalanobis cost under which the logistic representation is exact.
class CostFunction {
 public:
  static CostFunction lq(double q, double power = 2.0);
  static CostFunction mahalanobis(PsdMatrix lambda, double power = 2.0);
  static CostFunction mahalanobis_feature(PsdMatrix lambda, FeatureMap map,
                                          double power = 2.0);

  CostKind kind() const { return kind_; }
  double power() const { return power_; }
  const PsdMatrix* lambda() const { return lambda_ ? &*lambda_ : nullptr; }

  /// Full cost including the label-flip penalty.
  double operator()(const Atom& w, const Atom& w2) const;

  /// Finite branch: the feature-space cost with labels held equal.
  double feature_cost(const Eigen::VectorXd& x, const Eigen::VectorXd& x2) const;

  /// Column-wise feature cost of many candidate points u against one anchor x.
  Eigen::VectorXd feature_cost_batch(const Eigen::MatrixXd& u,
                                     const Eigen::VectorXd& x) const;

 private:
  CostFunction(CostKind kind, double power) : kind_(kind), power_(power) {}

  CostKind kind_;
  double power_;
  double q_ = 2.0;                    // lq norm index
  std::optional<PsdMatrix> lambda_;   // mahalanobis kinds
  std::optional<FeatureMap> map_;     // mahalanobis_feature
};

}  // namespace dro
