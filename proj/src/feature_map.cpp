#include "dro/feature_map.hpp"

#include <stdexcept>

namespace dro {

FeatureMap::FeatureMap(FeatureMapKind kind, Eigen::Index input_dim)
    : kind_(kind), input_dim_(input_dim) {
  if (input_dim <= 0) throw std::invalid_argument("FeatureMap: input_dim must be positive");
  output_dim_ = kind == FeatureMapKind::identity
                    ? input_dim
                    : input_dim + input_dim * (input_dim + 1) / 2;
}

Eigen::VectorXd FeatureMap::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("FeatureMap: expected dimension " +
                                std::to_string(input_dim_) + ", got " +
                                std::to_string(x.size()));
  }
  if (kind_ == FeatureMapKind::identity) return x;
  Eigen::VectorXd out(output_dim_);
  out.head(input_dim_) = x;
  Eigen::Index k = input_dim_;
  for (Eigen::Index i = 0; i < input_dim_; ++i)
    for (Eigen::Index j = i; j < input_dim_; ++j) out(k++) = x(i) * x(j);
  return out;
}

Eigen::MatrixXd FeatureMap::apply_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), output_dim_);
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = (*this)(x.row(r).transpose());
  return out;
}

}  // namespace dro
