#pragma once

#include <Eigen/Dense>

namespace dro {

/// Dense symmetric matrix. Storage is exactly symmetric: the constructor
/// mirrors the upper triangle into the lower one, so entries(i,j) == entries(j,i)
/// holds bit for bit.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m, double asym_tol = 1e-9);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  static SymMatrix identity(Eigen::Index d) {
    return SymMatrix(Eigen::MatrixXd::Identity(d, d));
  }

 private:
  Eigen::MatrixXd entries_;
};

/// Symmetric positive semidefinite matrix with a certified lower bound on its
/// smallest eigenvalue. A strictly positive bound certifies invertibility.
class PsdMatrix {
 public:
  /// Validates near-PSD-ness: smallest eigenvalue >= -1e-10 * |largest|.
  /// Throws std::invalid_argument otherwise.
  explicit PsdMatrix(const SymMatrix& base);
  explicit PsdMatrix(const Eigen::MatrixXd& m) : PsdMatrix(SymMatrix(m)) {}

  Eigen::Index dim() const { return base_.dim(); }
  const SymMatrix& base() const { return base_; }
  const Eigen::MatrixXd& matrix() const { return base_.matrix(); }
  double min_eigenvalue_bound() const { return min_eig_bound_; }
  bool certified_invertible() const { return min_eig_bound_ > 0.0; }

  static PsdMatrix identity(Eigen::Index d) { return PsdMatrix(SymMatrix::identity(d)); }

  /// Trusted path for operations that certify the bound by construction
  /// (PSD projection, spectral floor). The bound is still cross-checked in
  /// debug builds.
  static PsdMatrix with_certified_bound(SymMatrix base, double bound);

 private:
  PsdMatrix(SymMatrix base, double bound, int /*trusted tag*/)
      : base_(std::move(base)), min_eig_bound_(bound) {}

  SymMatrix base_;
  double min_eig_bound_ = 0.0;
};

/// Lower-triangular Cholesky factor L with strictly positive diagonal,
/// L * L^T reconstructing the source matrix.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Eigen::MatrixXd lower);

  Eigen::Index dim() const { return lower_.rows(); }
  const Eigen::MatrixXd& lower() const { return lower_; }

  /// Solves L z = b.
  Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;
  /// Solves L^T z = b.
  Eigen::VectorXd solve_upper(const Eigen::VectorXd& b) const;
  /// Solves (L L^T) z = b via two triangular solves.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd lower_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal, matching order
};

/// Full symmetric eigendecomposition, eigenvalues in descending order.
/// Throws std::runtime_error with the residual norm if the solver fails.
EigenDecomposition sym_eigen(const SymMatrix& s);

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero in the
/// eigenbasis.
PsdMatrix psd_project(const SymMatrix& s);

/// Cholesky factorization of a certified strictly PD matrix. Throws
/// std::runtime_error naming the failing leading minor if a non-positive
/// pivot is hit.
CholeskyFactor cholesky(const PsdMatrix& a);

/// sqrt((x - x2)^T A (x - x2)). Clamps roundoff-negative quadratic forms to 0.
double mahalanobis_dist(const PsdMatrix& a, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& x2);

/// Dual norm ||beta||_{A^{-1}} = sqrt(beta^T A^{-1} beta), computed through
/// triangular solves against the Cholesky factor; no inverse is formed.
double dual_norm(const PsdMatrix& a, const Eigen::VectorXd& beta);
double dual_norm(const CholeskyFactor& factor, const Eigen::VectorXd& beta);

/// A^{-1} w via the factor (two triangular solves). Requires certified PD.
Eigen::VectorXd solve_psd(const PsdMatrix& a, const Eigen::VectorXd& w);

}  // namespace dro
