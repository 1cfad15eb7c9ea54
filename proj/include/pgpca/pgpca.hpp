#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgpca/coords.hpp"
#include "pgpca/landmarks.hpp"
#include "pgpca/manifold.hpp"

namespace pgpca {

/// y = phi(z) + K(z) C x + r, with x ~ N(0, I_m), r ~ N(0, sigma2 I_n) and
/// z drawn from the landmark discretization of p(z).
struct PgpcaModel {
  Manifold manifold;
  CoordinateField coords;
  LandmarkSet landmarks;
  Matrix loading;  // n x m; empty (n x 0) when m = 0
  double sigma2 = 1.0;

  int ambient_dim() const { return manifold.ambient_dim(); }
  int model_dim() const { return static_cast<int>(loading.cols()); }
  void validate() const;
};

/// Posterior q_i(z_j) over landmarks, one row per sample (T x M).
struct Responsibilities {
  Matrix q;
};

/// ln N(y; phi(z), K(z) C C' K(z)' + sigma2 I_n) without forming the covariance.
double log_cond_density(const PgpcaModel& model, const Vector& y, const State& z);

Responsibilities e_step(const PgpcaModel& model, const DataMatrix& data);

/// omega_j = (1/T) sum_i q_i(z_j).
Vector m_step_weights(const Responsibilities& resp);

/// Gamma(q) = (1/T) sum_j sum_i q_i(z_j) K_j' (y_i - phi_j)(y_i - phi_j)' K_j.
Matrix gamma_matrix(const DataMatrix& data, const Responsibilities& resp, const Manifold& manifold,
                    const CoordinateField& coords, const LandmarkSet& landmarks);

struct LoadingUpdate {
  Matrix loading;     // n x m, orthogonal columns
  double sigma2 = 0;  // noise variance
  Vector eigenvalues; // of Gamma, descending
  int clamped = 0;    // leading eigenvalues that fell below sigma2
  bool floored = false;
};

/// Closed-form maximizer of the C/sigma2 part of the M-step objective.
/// sigma2 is the mean of the trailing n - m eigenvalues, never below
/// kSigma2FloorRatio * trace / n; when m = n it equals that floor.
LoadingUpdate m_step_params(const Matrix& gamma, int m);

inline constexpr double kSigma2FloorRatio = 1e-6;
inline constexpr double kSigma2Min = 1e-12;

/// Evidence lower bound sum_i sum_j q_ij [ln(p(y_i|z_j) w_j) - ln q_ij] with 0 ln 0 = 0.
double elbo(const PgpcaModel& model, const DataMatrix& data, const Responsibilities& resp);

/// sum_i ln sum_j p(y_i|z_j) w_j.
double log_likelihood(const PgpcaModel& model, const DataMatrix& data);

/// Per-sample ln p(y_i), in sample order.
Vector sample_log_likelihoods(const PgpcaModel& model, const DataMatrix& data);

/// M-step objective for C and sigma2 given Gamma (per sample, i.e. divided by T).
double expected_complete_loglik(const Matrix& gamma, const Matrix& loading, double sigma2);

struct FitConfig {
  int dim = 0;              // model dimension m
  int landmarks = 500;      // M
  int max_iters = 20;
  double elbo_tol = 1e-7;   // relative ELBO improvement threshold
  std::uint64_t seed = 0;
  bool learn_weights = true;
  int restarts = 1;

  void validate(int ambient_dim) const;
};

struct FitReport {
  /// ELBO after each EM iteration, evaluated at that iteration's posterior
  /// and the updated parameters.
  std::vector<double> elbo_trace;
  /// Log-likelihood of the parameters entering each iteration.
  std::vector<double> loglik_trace;
  double final_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  int clamped = 0;
  int floored = 0;
  int restart = 0;
  std::vector<std::string> warnings;

  /// Every step satisfies ELBO(k+1) >= ELBO(k) - slack |ELBO(k)|.
  bool elbo_non_decreasing(double slack = 1e-8) const;
};

struct FitResult {
  PgpcaModel model;
  FitReport report;
};

/// EM for C, sigma2 and (optionally) the landmark weights. When `initial` is
/// given its points and weights are used; otherwise make_landmarks() lays out
/// config.landmarks uniformly weighted landmarks.
FitResult fit(const DataMatrix& data, const Manifold& manifold, const CoordinateField& coords,
              const FitConfig& config, const std::optional<LandmarkSet>& initial = std::nullopt);

}  // namespace pgpca
