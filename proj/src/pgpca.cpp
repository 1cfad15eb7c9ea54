#include "pgpca/pgpca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pgpca/error.hpp"
#include "pgpca/linalg.hpp"
#include "pgpca/parallel.hpp"

namespace pgpca {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_data(const DataMatrix& data, int n) {
  if (data.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "data have " + std::to_string(data.cols()) + " columns, model expects " + std::to_string(n));
  }
  if (!data.allFinite()) throw Error(ErrorKind::NonFiniteInput, "data contain non-finite values");
}

// Landmark geometry in flat arrays: manifold points, frames and (per
// parameter set) whitening maps W_j = R K_j' with R'R = Lambda^-1.
class LandmarkTable {
 public:
  LandmarkTable(const Manifold& manifold, const CoordinateField& coords, const LandmarkSet& landmarks)
      : n_(manifold.ambient_dim()), m_(static_cast<int>(landmarks.size())) {
    points_.resize(static_cast<std::size_t>(m_) * n_);
    frames_ = landmark_frames(coords, manifold, landmarks);
    for (int j = 0; j < m_; ++j) {
      const Vector p = manifold.evaluate(landmarks.points[j]);
      std::copy(p.data(), p.data() + n_, points_.begin() + static_cast<std::ptrdiff_t>(j) * n_);
    }
  }

  int dim() const { return n_; }
  int size() const { return m_; }
  const double* point(int j) const { return points_.data() + static_cast<std::ptrdiff_t>(j) * n_; }
  const Matrix& frame(int j) const { return frames_[j]; }

 private:
  int n_;
  int m_;
  std::vector<double> points_;
  std::vector<Matrix> frames_;
};

// Everything needed to evaluate ln(w_j p(y|z_j)) for one parameter set.
class Scorer {
 public:
  Scorer(const LandmarkTable& table, const Matrix& loading, double sigma2, const Vector& weights)
      : table_(table), cov_(loading, sigma2) {
    const int n = table.dim();
    const int m = table.size();
    if (weights.size() != m) throw Error(ErrorKind::DimensionMismatch, "weights do not match landmarks");
    whiten_.resize(static_cast<std::size_t>(m) * n * n);
    log_prior_.resize(m);
    for (int j = 0; j < m; ++j) {
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w =
          cov_.whitener() * table.frame(j).transpose();
      std::copy(w.data(), w.data() + n * n, whiten_.begin() + static_cast<std::ptrdiff_t>(j) * n * n);
      log_prior_[j] = weights[j] > 0.0 ? std::log(weights[j]) + cov_.log_norm() : kNegInf;
    }
  }

  const LandmarkTable& table() const { return table_; }
  const BasicCovariance& covariance() const { return cov_; }

  // out[j] = ln w_j + ln p(y|z_j); -inf for zero-weight landmarks. Returns the max.
  // N > 0 fixes the ambient dimension at compile time so the small loops unroll.
  template <int N>
  double log_terms(const double* y, double* out, double* scratch) const {
    const int n = N > 0 ? N : table_.dim();
    const int m = table_.size();
    double best = kNegInf;
    for (int j = 0; j < m; ++j) {
      if (log_prior_[j] == kNegInf) {
        out[j] = kNegInf;
        continue;
      }
      const double* p = table_.point(j);
      for (int c = 0; c < n; ++c) scratch[c] = y[c] - p[c];
      const double* w = whiten_.data() + static_cast<std::ptrdiff_t>(j) * n * n;
      double quad = 0.0;
      for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += w[r * n + c] * scratch[c];
        quad += s * s;
      }
      const double v = log_prior_[j] - 0.5 * quad;
      out[j] = v;
      best = std::max(best, v);
    }
    return best;
  }

 private:
  const LandmarkTable& table_;
  BasicCovariance cov_;
  std::vector<double> whiten_;
  std::vector<double> log_prior_;
};

double log_sum_exp_row(const double* terms, int m, double best) {
  if (best == kNegInf) throw Error(ErrorKind::AllZeroLikelihood, "every landmark has zero posterior mass");
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::exp(terms[j] - best);
  return best + std::log(s);
}

// Replaces terms[j] by exp(terms[j] - best) and returns ln sum_j exp(terms[j]).
double exponentiate_row(double* terms, int m, double best) {
  if (best == kNegInf) throw Error(ErrorKind::AllZeroLikelihood, "every landmark has zero posterior mass");
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    terms[j] = std::exp(terms[j] - best);
    s += terms[j];
  }
  return best + std::log(s);
}

int tri_size(int n) { return n * (n + 1) / 2; }

// Sufficient statistics of one E-step pass.
struct PassStats {
  double loglik = 0.0;
  double entropy = 0.0;
  std::vector<double> weight_sums;  // sum_i q_ij
  std::vector<double> scatter;      // per landmark, upper triangle of sum_i q_ij d d'

  void add(const PassStats& o) {
    loglik += o.loglik;
    entropy += o.entropy;
    for (std::size_t k = 0; k < weight_sums.size(); ++k) weight_sums[k] += o.weight_sums[k];
    for (std::size_t k = 0; k < scatter.size(); ++k) scatter[k] += o.scatter[k];
  }
};

// Fixed-shape pairwise reduction of block partials.
template <class T>
T pairwise_reduce(std::vector<T> parts) {
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < parts.size(); k += 2) {
      parts[k].add(parts[k + 1]);
      next.push_back(std::move(parts[k]));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

struct Scalar {
  double v = 0.0;
  void add(const Scalar& o) { v += o.v; }
};

template <int N>
void pass_block(const Scorer& scorer, const DataMatrix& data, std::size_t begin, std::size_t end, bool with_stats,
                PassStats& st) {
  const int n = N > 0 ? N : scorer.table().dim();
  const int m = scorer.table().size();
  std::vector<double> terms(m);
  std::vector<double> scaled(m);
  std::vector<double> d(n);
  for (std::size_t i = begin; i < end; ++i) {
    const double* y = data.data() + i * n;
    const double best = scorer.template log_terms<N>(y, terms.data(), d.data());
    if (with_stats) std::copy(terms.begin(), terms.end(), scaled.begin());
    const double lse = exponentiate_row(with_stats ? scaled.data() : terms.data(), m, best);
    st.loglik += lse;
    if (!with_stats) continue;
    const double norm = std::exp(best - lse);  // 1 / sum_j exp(terms[j] - best)
    double expected_term = 0.0;
    double* s = st.scatter.data();
    for (int j = 0; j < m; ++j, s += n * (n + 1) / 2) {
      const double q = scaled[j] * norm;
      if (q == 0.0) continue;
      expected_term += q * terms[j];
      st.weight_sums[j] += q;
      const double* p = scorer.table().point(j);
      for (int c = 0; c < n; ++c) d[c] = y[c] - p[c];
      int k = 0;
      for (int r = 0; r < n; ++r) {
        const double qd = q * d[r];
        for (int c = r; c < n; ++c) s[k++] += qd * d[c];
      }
    }
    st.entropy += lse - expected_term;
  }
}

PassStats run_pass(const Scorer& scorer, const DataMatrix& data, bool with_stats) {
  const int n = scorer.table().dim();
  const int m = scorer.table().size();
  const int tri = tri_size(n);
  const auto t = static_cast<std::size_t>(data.rows());
  const std::size_t blocks = block_count(t);
  std::vector<PassStats> parts(blocks);
  parallel_for_blocks(blocks, [&](std::size_t b) {
    PassStats& st = parts[b];
    if (with_stats) {
      st.weight_sums.assign(m, 0.0);
      st.scatter.assign(static_cast<std::size_t>(m) * tri, 0.0);
    }
    const std::size_t begin = b * kSampleBlock;
    const std::size_t end = std::min(t, begin + kSampleBlock);
    switch (n) {
      case 1: pass_block<1>(scorer, data, begin, end, with_stats, st); break;
      case 2: pass_block<2>(scorer, data, begin, end, with_stats, st); break;
      case 3: pass_block<3>(scorer, data, begin, end, with_stats, st); break;
      case 10: pass_block<10>(scorer, data, begin, end, with_stats, st); break;
      default: pass_block<0>(scorer, data, begin, end, with_stats, st); break;
    }
  });
  return pairwise_reduce(std::move(parts));
}

// Gamma from per-landmark ambient scatter: (1/T) sum_j K_j' S_j K_j.
Matrix rotate_scatter(const LandmarkTable& table, const std::vector<double>& scatter, double t) {
  const int n = table.dim();
  const int tri = tri_size(n);
  Matrix gamma = Matrix::Zero(n, n);
  Matrix s(n, n);
  for (int j = 0; j < table.size(); ++j) {
    const double* src = scatter.data() + static_cast<std::ptrdiff_t>(j) * tri;
    int k = 0;
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) s(r, c) = s(c, r) = src[k++];
    const Matrix& frame = table.frame(j);
    gamma.noalias() += frame.transpose() * s * frame;
  }
  gamma /= t;
  return 0.5 * (gamma + gamma.transpose());
}

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) g(r, c) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FitResult fit_once(const DataMatrix& data, const Manifold& manifold, const CoordinateField& coords,
                   const FitConfig& config, const LandmarkSet& landmarks, const LandmarkTable& table,
                   std::uint64_t seed) {
  const int n = manifold.ambient_dim();
  const int m = config.dim;
  const auto t = static_cast<double>(data.rows());
  std::mt19937_64 rng(seed);

  Vector weights = landmarks.weights;

  // sigma2: half the mean squared distance to the nearest weighted landmark.
  double nearest = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < table.size(); ++j) {
      if (weights[j] <= 0.0) continue;
      double d2 = 0.0;
      for (int c = 0; c < n; ++c) {
        const double d = data(i, c) - table.point(j)[c];
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
    nearest += best;
  }
  double sigma2 = std::max(0.5 * nearest / t, kSigma2Min);

  // C: random orthonormal columns scaled by the sample standard deviation.
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const double sample_sd = std::sqrt((data.rowwise() - mean).squaredNorm() / (t * n));
  Matrix loading = random_orthogonal(n, rng).leftCols(m) * sample_sd;

  FitReport report;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const Scorer scorer(table, loading, sigma2, weights);
    const PassStats stats = run_pass(scorer, data, true);
    report.loglik_trace.push_back(stats.loglik);

    Vector expected_weights(table.size());
    for (int j = 0; j < table.size(); ++j) expected_weights[j] = stats.weight_sums[j] / t;
    if (config.learn_weights) weights = expected_weights / expected_weights.sum();

    const Matrix gamma = rotate_scatter(table, stats.scatter, t);
    LoadingUpdate update = m_step_params(gamma, m);
    report.clamped += update.clamped;
    report.floored += update.floored ? 1 : 0;
    loading = std::move(update.loading);
    sigma2 = update.sigma2;

    double prior_term = 0.0;
    for (int j = 0; j < table.size(); ++j) {
      if (stats.weight_sums[j] > 0.0) prior_term += stats.weight_sums[j] * std::log(weights[j]);
    }
    const double value = t * expected_complete_loglik(gamma, loading, sigma2) + prior_term + stats.entropy;
    report.elbo_trace.push_back(value);
    report.iterations = iter + 1;

    if (iter > 0) {
      const double prev = report.elbo_trace[iter - 1];
      if (value - prev <= config.elbo_tol * std::abs(prev)) {
        report.converged = true;
        break;
      }
    }
  }
  if (!report.converged) {
    report.warnings.push_back("ConvergenceWarning: reached " + std::to_string(config.max_iters) +
                              " iterations without meeting the ELBO tolerance");
  }

  PgpcaModel model{manifold, coords, landmarks, std::move(loading), sigma2};
  model.landmarks.weights = weights;
  const Scorer final_scorer(table, model.loading, model.sigma2, model.landmarks.weights);
  report.final_log_likelihood = run_pass(final_scorer, data, false).loglik;
  return FitResult{std::move(model), std::move(report)};
}

}  // namespace

void PgpcaModel::validate() const {
  const int n = ambient_dim();
  if (loading.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch, "loading matrix must have n = " + std::to_string(n) + " rows");
  }
  if (loading.cols() > n) throw Error(ErrorKind::InvalidDimension, "model dimension exceeds ambient dimension");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive");
  landmarks.validate();
  for (const auto& z : landmarks.points) {
    if (z.size() != manifold.intrinsic_dim()) {
      throw Error(ErrorKind::DimensionMismatch, "landmark state dimension does not match the manifold");
    }
  }
}

double log_cond_density(const PgpcaModel& model, const Vector& y, const State& z) {
  if (!y.allFinite()) throw Error(ErrorKind::NonFiniteInput, "observation contains non-finite values");
  if (y.size() != model.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "observation dimension mismatch");
  const BasicCovariance cov(model.loading, model.sigma2);
  const Matrix frame = model.coords.frame(model.manifold, z);
  const Vector whitened = cov.whitener() * (frame.transpose() * (y - model.manifold.evaluate(z)));
  return cov.log_norm() - 0.5 * whitened.squaredNorm();
}

Responsibilities e_step(const PgpcaModel& model, const DataMatrix& data) {
  model.validate();
  check_data(data, model.ambient_dim());
  const LandmarkTable table(model.manifold, model.coords, model.landmarks);
  const Scorer scorer(table, model.loading, model.sigma2, model.landmarks.weights);
  const int m = table.size();
  const auto t = static_cast<std::size_t>(data.rows());
  Responsibilities resp{Matrix(data.rows(), m)};
  parallel_for_blocks(block_count(t), [&](std::size_t b) {
    std::vector<double> terms(m);
    std::vector<double> scratch(table.dim());
    const std::size_t end = std::min(t, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const double best = scorer.log_terms<0>(data.data() + i * table.dim(), terms.data(), scratch.data());
      const double lse = log_sum_exp_row(terms.data(), m, best);
      for (int j = 0; j < m; ++j) resp.q(static_cast<Eigen::Index>(i), j) = std::exp(terms[j] - lse);
    }
  });
  return resp;
}

Vector m_step_weights(const Responsibilities& resp) {
  const auto t = static_cast<double>(resp.q.rows());
  Vector w(resp.q.cols());
  for (Eigen::Index j = 0; j < resp.q.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < resp.q.rows(); ++i) s += resp.q(i, j);
    w[j] = s / t;
  }
  return w;
}

Matrix gamma_matrix(const DataMatrix& data, const Responsibilities& resp, const Manifold& manifold,
                    const CoordinateField& coords, const LandmarkSet& landmarks) {
  const int n = manifold.ambient_dim();
  check_data(data, n);
  if (resp.q.rows() != data.rows() || resp.q.cols() != static_cast<Eigen::Index>(landmarks.size())) {
    throw Error(ErrorKind::DimensionMismatch, "responsibilities do not match data and landmarks");
  }
  const LandmarkTable table(manifold, coords, landmarks);
  const auto t = static_cast<std::size_t>(data.rows());
  const std::size_t blocks = block_count(t);
  Matrix gamma = Matrix::Zero(n, n);
  for (int j = 0; j < table.size(); ++j) {
    const Eigen::Map<const Vector> phi(table.point(j), n);
    std::vector<Matrix> parts(blocks, Matrix::Zero(n, n));
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t end = std::min(t, (b + 1) * kSampleBlock);
      for (std::size_t i = b * kSampleBlock; i < end; ++i) {
        const double q = resp.q(static_cast<Eigen::Index>(i), j);
        if (q == 0.0) continue;
        const Vector d = data.row(static_cast<Eigen::Index>(i)).transpose() - phi;
        parts[b].noalias() += q * d * d.transpose();
      }
    }
    while (parts.size() > 1) {
      std::vector<Matrix> next;
      for (std::size_t k = 0; k + 1 < parts.size(); k += 2) next.push_back(parts[k] + parts[k + 1]);
      if (parts.size() % 2 == 1) next.push_back(parts.back());
      parts = std::move(next);
    }
    if (!parts.empty()) gamma.noalias() += table.frame(j).transpose() * parts.front() * table.frame(j);
  }
  gamma /= static_cast<double>(t);
  return 0.5 * (gamma + gamma.transpose());
}

LoadingUpdate m_step_params(const Matrix& gamma, int m) {
  const int n = static_cast<int>(gamma.rows());
  if (gamma.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Gamma must be square");
  if (m < 0 || m > n) {
    throw Error(ErrorKind::InvalidDimension,
                "model dimension " + std::to_string(m) + " outside [0, " + std::to_string(n) + "]");
  }
  const SymmetricEigen eig = eigen_descending(gamma);
  LoadingUpdate out;
  out.eigenvalues = eig.values;
  const double floor = std::max(kSigma2FloorRatio * gamma.trace() / n, kSigma2Min);
  if (m < n) {
    out.sigma2 = eig.values.tail(n - m).sum() / (n - m);
    if (out.sigma2 < floor) {
      out.sigma2 = floor;
      out.floored = true;
    }
  } else {
    out.sigma2 = floor;
    out.floored = true;
  }
  out.loading.resize(n, m);
  for (int i = 0; i < m; ++i) {
    const double excess = eig.values[i] - out.sigma2;
    if (excess < 0.0) ++out.clamped;
    out.loading.col(i) = eig.vectors.col(i) * std::sqrt(std::max(excess, 0.0));
  }
  return out;
}

double expected_complete_loglik(const Matrix& gamma, const Matrix& loading, double sigma2) {
  const BasicCovariance cov(loading, sigma2);
  return cov.log_norm() - 0.5 * (cov.precision().cwiseProduct(gamma)).sum();
}

double elbo(const PgpcaModel& model, const DataMatrix& data, const Responsibilities& resp) {
  model.validate();
  check_data(data, model.ambient_dim());
  const LandmarkTable table(model.manifold, model.coords, model.landmarks);
  if (resp.q.rows() != data.rows() || resp.q.cols() != table.size()) {
    throw Error(ErrorKind::DimensionMismatch, "responsibilities do not match data and landmarks");
  }
  const Scorer scorer(table, model.loading, model.sigma2, model.landmarks.weights);
  const int m = table.size();
  const auto t = static_cast<std::size_t>(data.rows());
  std::vector<Scalar> parts(block_count(t));
  parallel_for_blocks(parts.size(), [&](std::size_t b) {
    std::vector<double> terms(m);
    std::vector<double> scratch(table.dim());
    const std::size_t end = std::min(t, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      scorer.log_terms<0>(data.data() + i * table.dim(), terms.data(), scratch.data());
      for (int j = 0; j < m; ++j) {
        const double q = resp.q(static_cast<Eigen::Index>(i), j);
        if (q > 0.0) parts[b].v += q * (terms[j] - std::log(q));
      }
    }
  });
  return pairwise_reduce(std::move(parts)).v;
}

Vector sample_log_likelihoods(const PgpcaModel& model, const DataMatrix& data) {
  model.validate();
  check_data(data, model.ambient_dim());
  const LandmarkTable table(model.manifold, model.coords, model.landmarks);
  const Scorer scorer(table, model.loading, model.sigma2, model.landmarks.weights);
  const int m = table.size();
  const auto t = static_cast<std::size_t>(data.rows());
  Vector out(data.rows());
  parallel_for_blocks(block_count(t), [&](std::size_t b) {
    std::vector<double> terms(m);
    std::vector<double> scratch(table.dim());
    const std::size_t end = std::min(t, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const double best = scorer.log_terms<0>(data.data() + i * table.dim(), terms.data(), scratch.data());
      out[static_cast<Eigen::Index>(i)] = log_sum_exp_row(terms.data(), m, best);
    }
  });
  return out;
}

double log_likelihood(const PgpcaModel& model, const DataMatrix& data) {
  model.validate();
  check_data(data, model.ambient_dim());
  const LandmarkTable table(model.manifold, model.coords, model.landmarks);
  const Scorer scorer(table, model.loading, model.sigma2, model.landmarks.weights);
  return run_pass(scorer, data, false).loglik;
}

void FitConfig::validate(int ambient_dim) const {
  if (dim < 0 || dim > ambient_dim) {
    throw Error(ErrorKind::InvalidDimension,
                "model dimension " + std::to_string(dim) + " outside [0, " + std::to_string(ambient_dim) + "]");
  }
  if (landmarks < 1) throw Error(ErrorKind::InvalidArgument, "landmark count must be at least 1");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be at least 1");
  if (!(elbo_tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "elbo_tol must be nonnegative");
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be at least 1");
}

bool FitReport::elbo_non_decreasing(double slack) const {
  for (std::size_t k = 1; k < elbo_trace.size(); ++k) {
    if (elbo_trace[k] < elbo_trace[k - 1] - slack * std::abs(elbo_trace[k - 1])) return false;
  }
  return true;
}

FitResult fit(const DataMatrix& data, const Manifold& manifold, const CoordinateField& coords,
              const FitConfig& config, const std::optional<LandmarkSet>& initial) {
  const int n = manifold.ambient_dim();
  config.validate(n);
  check_data(data, n);
  if (data.rows() < 2) throw Error(ErrorKind::InsufficientData, "fitting needs at least 2 samples");
  const LandmarkSet landmarks = initial ? *initial : make_landmarks(manifold, config.landmarks);
  landmarks.validate();
  const LandmarkTable table(manifold, coords, landmarks);

  std::optional<FitResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    const std::uint64_t seed = r == 0 ? config.seed : restart_seed(config.seed, r);
    FitResult candidate = fit_once(data, manifold, coords, config, landmarks, table, seed);
    candidate.report.restart = r;
    if (!best || candidate.report.final_log_likelihood > best->report.final_log_likelihood) {
      best = std::move(candidate);
    }
  }
  return std::move(*best);
}

}  // namespace pgpca
