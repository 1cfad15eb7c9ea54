#pragma once

#include "pgpca/types.hpp"

namespace pgpca {

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order. Each
/// eigenvector is signed so that its largest-magnitude entry is positive.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

SymmetricEigen eigen_descending(const Matrix& symmetric);

/// The frame-local covariance Lambda = C C' + sigma2 I_n and the quantities
/// the likelihood needs from it, computed without forming Psi(z):
///   ln|Psi(z)| = (n - m) ln sigma2 + ln|sigma2 I_m + C'C|   for every z
///   Psi(z)^-1  = K(z) Lambda^-1 K(z)'
class BasicCovariance {
 public:
  BasicCovariance(const Matrix& loading, double sigma2);

  int dim() const { return static_cast<int>(precision_.rows()); }
  double log_det() const { return log_det_; }
  /// -0.5 (n ln 2pi + ln|Psi|).
  double log_norm() const { return log_norm_; }
  /// Lambda^-1 via the Woodbury identity.
  const Matrix& precision() const { return precision_; }
  /// Upper-triangular R with R'R = Lambda^-1, so the Mahalanobis form of a
  /// residual d at frame K is |R K' d|^2.
  const Matrix& whitener() const { return whitener_; }

 private:
  double log_det_ = 0.0;
  double log_norm_ = 0.0;
  Matrix precision_;
  Matrix whitener_;
};

/// ln|K C C' K' + sigma2 I_n| by the determinant lemma; independent of K.
double log_det_psi(const Matrix& loading, double sigma2);

}  // namespace pgpca
