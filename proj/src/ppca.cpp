#include "pgpca/ppca.hpp"

#include "pgpca/error.hpp"
#include "pgpca/linalg.hpp"

namespace pgpca {

PpcaModel fit_ppca(const DataMatrix& data, int m) {
  const auto n = data.cols();
  if (data.rows() < 2) throw Error(ErrorKind::InsufficientData, "PPCA needs at least 2 samples");
  if (m < 0 || m > n) throw Error(ErrorKind::InvalidDimension, "model dimension outside [0, n]");
  if (!data.allFinite()) throw Error(ErrorKind::NonFiniteInput, "data contain non-finite values");
  PpcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - model.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows());
  LoadingUpdate update = m_step_params(0.5 * (cov + cov.transpose()), m);
  model.loading = std::move(update.loading);
  model.sigma2 = update.sigma2;
  return model;
}

Vector ppca_sample_log_likelihoods(const PpcaModel& model, const DataMatrix& data) {
  if (data.cols() != model.mean.size()) throw Error(ErrorKind::DimensionMismatch, "data dimension mismatch");
  if (!data.allFinite()) throw Error(ErrorKind::NonFiniteInput, "data contain non-finite values");
  const BasicCovariance cov(model.loading, model.sigma2);
  Vector out(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Vector d = data.row(i).transpose() - model.mean;
    out[i] = cov.log_norm() - 0.5 * (cov.whitener() * d).squaredNorm();
  }
  return out;
}

double ppca_log_likelihood(const PpcaModel& model, const DataMatrix& data) {
  return ppca_sample_log_likelihoods(model, data).sum();
}

PgpcaModel as_pgpca(const PpcaModel& model) {
  LandmarkSet landmarks;
  landmarks.points.push_back(State::Zero(1));
  landmarks.weights = Vector::Ones(1);
  return PgpcaModel{Manifold::constant(model.mean), CoordinateField::euclidean(), std::move(landmarks),
                    model.loading, model.sigma2};
}

}  // namespace pgpca
