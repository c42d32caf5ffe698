#include "dro/linalg.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dro {

namespace {

std::string dim_string(Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m, double asym_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("SymMatrix: expected a nonempty square matrix, got " +
                                dim_string(m.rows(), m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > asym_tol * scale) {
    throw std::invalid_argument("SymMatrix: input is not symmetric (max asymmetry " +
                                std::to_string(asym) + ")");
  }
  // Mirror the upper triangle so storage is exactly symmetric.
  entries_ = m;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) entries_(j, i) = entries_(i, j);
}

PsdMatrix::PsdMatrix(const SymMatrix& base) : base_(base) {
  const EigenDecomposition ed = sym_eigen(base_);
  const double max_abs = ed.eigenvalues.cwiseAbs().maxCoeff();
  const double min_eig = ed.eigenvalues(ed.eigenvalues.size() - 1);
  if (min_eig < -1e-10 * std::max(max_abs, 1.0)) {
    throw std::invalid_argument("PsdMatrix: matrix is indefinite (min eigenvalue " +
                                std::to_string(min_eig) + ")");
  }
  min_eig_bound_ = std::max(0.0, min_eig - 1e-12 * std::max(max_abs, 1.0));
}

PsdMatrix PsdMatrix::with_certified_bound(SymMatrix base, double bound) {
  assert(bound >= 0.0);
  return PsdMatrix(std::move(base), bound, 0);
}

CholeskyFactor::CholeskyFactor(Eigen::MatrixXd lower) : lower_(std::move(lower)) {
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    if (!(lower_(i, i) > 0.0)) {
      throw std::invalid_argument("CholeskyFactor: diagonal must be strictly positive");
    }
  }
}

Eigen::VectorXd CholeskyFactor::solve_lower(const Eigen::VectorXd& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd CholeskyFactor::solve_upper(const Eigen::VectorXd& b) const {
  return lower_.transpose().triangularView<Eigen::Upper>().solve(b);
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
  return solve_upper(solve_lower(b));
}

EigenDecomposition sym_eigen(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.matrix());
  if (solver.info() != Eigen::Success) {
    // Residual of the partial factorization, for the diagnostic.
    const double residual =
        (s.matrix() - solver.eigenvectors() *
                          solver.eigenvalues().asDiagonal() *
                          solver.eigenvectors().transpose())
            .norm();
    throw std::runtime_error(
        "sym_eigen: eigendecomposition did not converge (residual norm " +
        std::to_string(residual) + ")");
  }
  // Eigen returns ascending order; flip to descending.
  const Eigen::Index d = s.dim();
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.eigenvectors.col(j) = solver.eigenvectors().col(d - 1 - j);
  }
  return out;
}

PsdMatrix psd_project(const SymMatrix& s) {
  const EigenDecomposition ed = sym_eigen(s);
  const Eigen::VectorXd clamped = ed.eigenvalues.cwiseMax(0.0);
  Eigen::MatrixXd projected =
      ed.eigenvectors * clamped.asDiagonal() * ed.eigenvectors.transpose();
  const double bound =
      std::max(0.0, clamped.minCoeff() - 1e-12 * std::max(1.0, clamped.maxCoeff()));
  return PsdMatrix::with_certified_bound(SymMatrix(projected), bound);
}

CholeskyFactor cholesky(const PsdMatrix& a) {
  if (!a.certified_invertible()) {
    throw std::invalid_argument(
        "cholesky: matrix is not certified strictly positive definite");
  }
  const Eigen::MatrixXd& m = a.matrix();
  const Eigen::Index d = m.rows();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = m(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) {
      throw std::runtime_error("cholesky: non-positive pivot at leading minor " +
                               std::to_string(j + 1));
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      lower(i, j) =
          (m(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / lower(j, j);
    }
  }
  return CholeskyFactor(std::move(lower));
}

double mahalanobis_dist(const PsdMatrix& a, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& x2) {
  if (x.size() != x2.size() || x.size() != a.dim()) {
    throw std::invalid_argument("mahalanobis_dist: dimension mismatch");
  }
  const Eigen::VectorXd diff = x - x2;
  const double q = diff.dot(a.matrix() * diff);
  return std::sqrt(std::max(0.0, q));
}

double dual_norm(const CholeskyFactor& factor, const Eigen::VectorXd& beta) {
  if (beta.size() != factor.dim()) {
    throw std::invalid_argument("dual_norm: dimension mismatch");
  }
  // beta^T (L L^T)^{-1} beta = ||L^{-1} beta||^2.
  return factor.solve_lower(beta).norm();
}

double dual_norm(const PsdMatrix& a, const Eigen::VectorXd& beta) {
  return dual_norm(cholesky(a), beta);
}

Eigen::VectorXd solve_psd(const PsdMatrix& a, const Eigen::VectorXd& w) {
  return cholesky(a).solve(w);
}

}  // namespace dro
