#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pgpca/pgpca.hpp"
#include "pgpca/ppca.hpp"
#include "pgpca/simulate.hpp"
#include "pgpca/stats.hpp"

namespace pgpca {

using AnyModel = std::variant<PgpcaModel, PpcaModel>;

Vector model_sample_log_likelihoods(const AnyModel& model, const DataMatrix& data);
/// L / T on `data`.
double average_log_likelihood(const AnyModel& model, const DataMatrix& data);

struct TrialResult {
  std::vector<double> average_ll;  // one entry per model, in input order
  int trial_len = 0;
};

/// Draws n_trials independent test sets of trial_len samples from `spec`
/// (trial k uses derive_seed(seed, k)) and scores every model on each.
std::vector<TrialResult> evaluate_trials(const std::vector<AnyModel>& models, const TrueModelSpec& spec,
                                         int n_trials, int trial_len, std::uint64_t seed);

/// Test-fold sample indices. Contiguous equal blocks unless `shuffle`.
std::vector<std::vector<Eigen::Index>> kfold_indices(Eigen::Index count, int folds, bool shuffle,
                                                     std::uint64_t seed);

struct CompareConfig {
  int dim = 0;
  int landmarks = 0;  // 0: the true model's count (500 for file data)
  int iters = 0;      // 0: the true model's count (20 for file data)
  double tol = 1e-7;
  int restarts = 1;
  /// Learn the landmark weights. When false with a spec, the true p(z)
  /// evaluated at the landmarks is used as given weights.
  bool learn_weights = true;
  int folds = 5;
  bool shuffle = false;
  int trials = 0;     // 0: spec default
  int trial_len = 0;  // 0: spec default
  int train_samples = 0;  // 0: spec default
  std::uint64_t seed = 0;
};

struct ModelScore {
  std::string name;                 // "gecov", "eucov" or "ppca"
  double mean_ll = 0.0;             // average log-likelihood per sample
  std::vector<double> scores;       // per trial (spec) or per test sample (data)
  std::optional<FitReport> report;  // absent for PPCA
};

struct ComparisonReport {
  std::string source;
  int dim = 0;
  bool learn_weights = true;
  std::vector<ModelScore> models;  // gecov, eucov, ppca
  std::string winner;              // better of gecov / eucov
  TTestResult coordinate_test;     // gecov vs eucov
  TTestResult winner_vs_ppca;
  bool significant = false;        // coordinate_test.p < kSignificance

  const ModelScore& score(const std::string& name) const;
};

inline constexpr double kSignificance = 0.05;

/// Fits GeCOV and EuCOV PGPCA plus PPCA on a sample of `spec`, then scores
/// them on independent test trials.
ComparisonReport compare_coordinates(const TrueModelSpec& spec, const CompareConfig& config);

/// k-fold cross-validated comparison on given data around a given manifold;
/// test log-likelihoods are pooled over folds and compared per sample.
ComparisonReport compare_coordinates(const DataMatrix& data, const Manifold& manifold, const CompareConfig& config);

/// One simulation column of the full-rank log-likelihood grid: the true
/// coordinate family and the mean trial-average LL of each fitted model,
/// averaged over the runs (torus: uniAng/uniTorus x given/learned weights).
struct GridColumn {
  std::string label;
  std::string true_coords;
  double gecov = 0.0;
  double eucov = 0.0;
  double ppca = 0.0;
  std::vector<ComparisonReport> runs;
};

/// Specs and weight settings that make up one grid column. Columns are
/// always fitted at full rank.
struct ColumnPlan {
  std::string label;
  CoordKind true_coords;
  std::vector<std::string> specs;
  std::vector<bool> learn_weights;
};

std::vector<ColumnPlan> table2_plans();
GridColumn run_column(const ColumnPlan& plan, const CompareConfig& base, std::uint64_t seed);

}  // namespace pgpca
