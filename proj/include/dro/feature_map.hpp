#pragma once

#include <Eigen/Dense>

namespace dro {

enum class FeatureMapKind { identity, linear_quadratic };

/// Injective continuous feature transform. The linear-quadratic map keeps the
/// identity coordinates and appends all products x_i*x_j for i <= j in
/// lexicographic order, so distinct inputs stay distinct.
class FeatureMap {
 public:
  FeatureMap(FeatureMapKind kind, Eigen::Index input_dim);

  FeatureMapKind kind() const { return kind_; }
  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  /// Row-wise application to an n x d matrix.
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& x) const;

 private:
  FeatureMapKind kind_;
  Eigen::Index input_dim_;
  Eigen::Index output_dim_;
};

inline Eigen::VectorXd apply_feature_map(const FeatureMap& map, const Eigen::VectorXd& x) {
  return map(x);
}

}  // namespace dro
