#pragma once

#include "pgpca/pgpca.hpp"

namespace pgpca {

/// Linear Gaussian baseline y ~ N(mean, C C' + sigma2 I).
struct PpcaModel {
  Vector mean;
  Matrix loading;  // n x m
  double sigma2 = 1.0;
};

/// Closed-form maximum-likelihood PPCA: the M-step formulas applied to the
/// sample covariance (1/T normalization).
PpcaModel fit_ppca(const DataMatrix& data, int m);

double ppca_log_likelihood(const PpcaModel& model, const DataMatrix& data);
Vector ppca_sample_log_likelihoods(const PpcaModel& model, const DataMatrix& data);

/// The same distribution written as a PGPCA model: one landmark on a
/// constant manifold at the mean, Euclidean frames.
PgpcaModel as_pgpca(const PpcaModel& model);

}  // namespace pgpca
