#include "pgpca/linalg.hpp"

#include <cmath>
#include <numbers>

#include "pgpca/error.hpp"

namespace pgpca {

SymmetricEigen eigen_descending(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "eigendecomposition failed");
  const auto n = symmetric.rows();
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    Vector v = solver.eigenvectors().col(n - 1 - i);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.vectors.col(i) = v;
  }
  return out;
}

double log_det_psi(const Matrix& loading, double sigma2) {
  const auto n = loading.rows();
  const auto m = loading.cols();
  double value = static_cast<double>(n - m) * std::log(sigma2);
  if (m > 0) {
    const Matrix inner = sigma2 * Matrix::Identity(m, m) + loading.transpose() * loading;
    Eigen::LLT<Matrix> llt(inner);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "sigma2 I + C'C is not positive definite");
    value += 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }
  return value;
}

BasicCovariance::BasicCovariance(const Matrix& loading, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive and finite");
  }
  if (!loading.allFinite()) throw Error(ErrorKind::NonFiniteInput, "loading matrix has non-finite entries");
  const auto n = loading.rows();
  const auto m = loading.cols();
  log_det_ = log_det_psi(loading, sigma2);
  log_norm_ = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det_);

  precision_ = Matrix::Identity(n, n) / sigma2;
  if (m > 0) {
    const Matrix inner = sigma2 * Matrix::Identity(m, m) + loading.transpose() * loading;
    precision_ -= loading * inner.llt().solve(loading.transpose()) / sigma2;
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
  }
  Eigen::LLT<Matrix> llt(precision_);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "precision is not positive definite");
  whitener_ = llt.matrixU();
}

}  // namespace pgpca
