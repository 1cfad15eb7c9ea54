#pragma once

#include <Eigen/Dense>

namespace pgpca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// T observations in R^n, one sample per row. Row-major so each sample is
/// contiguous in memory.
using DataMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A point of the manifold parameter domain (length 1 for loops, 2 for the torus).
using State = Eigen::VectorXd;

}  // namespace pgpca
