#include "pgpca/eval.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "pgpca/error.hpp"

namespace pgpca {
namespace {

int pick(int override_value, int fallback) { return override_value > 0 ? override_value : fallback; }

DataMatrix take_rows(const DataMatrix& data, const std::vector<Eigen::Index>& rows) {
  DataMatrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = data.row(rows[k]);
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void finish(ComparisonReport& report) {
  for (auto& m : report.models) m.mean_ll = mean(m.scores);
  const auto& geo = report.score("gecov");
  const auto& euc = report.score("eucov");
  report.winner = geo.mean_ll >= euc.mean_ll ? "gecov" : "eucov";
  report.coordinate_test = paired_t_test(geo.scores, euc.scores);
  report.winner_vs_ppca = paired_t_test(report.score(report.winner).scores, report.score("ppca").scores);
  report.significant = report.coordinate_test.p < kSignificance;
}

}  // namespace

const ModelScore& ComparisonReport::score(const std::string& name) const {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "no model named '" + name + "' in report");
}

Vector model_sample_log_likelihoods(const AnyModel& model, const DataMatrix& data) {
  if (const auto* p = std::get_if<PgpcaModel>(&model)) return sample_log_likelihoods(*p, data);
  return ppca_sample_log_likelihoods(std::get<PpcaModel>(model), data);
}

double average_log_likelihood(const AnyModel& model, const DataMatrix& data) {
  if (const auto* p = std::get_if<PgpcaModel>(&model)) return log_likelihood(*p, data) / static_cast<double>(data.rows());
  return ppca_log_likelihood(std::get<PpcaModel>(model), data) / static_cast<double>(data.rows());
}

std::vector<TrialResult> evaluate_trials(const std::vector<AnyModel>& models, const TrueModelSpec& spec,
                                         int n_trials, int trial_len, std::uint64_t seed) {
  if (n_trials < 1 || trial_len < 1) throw Error(ErrorKind::InvalidArgument, "trials and trial length must be positive");
  const int n = spec.manifold.ambient_dim();
  for (const auto& m : models) {
    const int dim = std::holds_alternative<PgpcaModel>(m) ? std::get<PgpcaModel>(m).ambient_dim()
                                                          : static_cast<int>(std::get<PpcaModel>(m).mean.size());
    if (dim != n) throw Error(ErrorKind::DimensionMismatch, "model and spec ambient dimensions differ");
  }
  std::vector<TrialResult> out;
  out.reserve(n_trials);
  for (int k = 0; k < n_trials; ++k) {
    const SampleResult trial = sample(spec, trial_len, derive_seed(seed, static_cast<std::uint64_t>(k)));
    TrialResult r;
    r.trial_len = trial_len;
    for (const auto& m : models) r.average_ll.push_back(average_log_likelihood(m, trial.data));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<Eigen::Index>> kfold_indices(Eigen::Index count, int folds, bool shuffle, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "cross-validation needs at least 2 folds");
  if (count < folds) throw Error(ErrorKind::InsufficientData, "fewer samples than folds");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<Eigen::Index>> out(folds);
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index begin = count * f / folds;
    const Eigen::Index end = count * (f + 1) / folds;
    out[f].assign(order.begin() + begin, order.begin() + end);
  }
  return out;
}

ComparisonReport compare_coordinates(const TrueModelSpec& spec, const CompareConfig& config) {
  spec.validate();
  const int train = pick(config.train_samples, spec.train_samples);
  const int trials = pick(config.trials, spec.trials);
  const int trial_len = pick(config.trial_len, spec.trial_len);

  FitConfig fc;
  fc.dim = config.dim;
  fc.landmarks = pick(config.landmarks, spec.landmarks);
  fc.max_iters = pick(config.iters, spec.em_iters);
  fc.elbo_tol = config.tol;
  fc.seed = derive_seed(config.seed, 3);
  fc.learn_weights = config.learn_weights;
  fc.restarts = config.restarts;

  LandmarkSet landmarks = make_landmarks(spec.manifold, fc.landmarks);
  if (!config.learn_weights) landmarks.weights = latent_weights(spec, landmarks);

  const SampleResult training = sample(spec, train, derive_seed(config.seed, 1));
  FitResult geo = fit(training.data, spec.manifold, CoordinateField::geometric(spec.manifold), fc, landmarks);
  FitResult euc = fit(training.data, spec.manifold, CoordinateField::euclidean(), fc, landmarks);
  PpcaModel lin = fit_ppca(training.data, config.dim);

  const std::vector<AnyModel> models{geo.model, euc.model, lin};
  const auto results = evaluate_trials(models, spec, trials, trial_len, derive_seed(config.seed, 2));

  ComparisonReport report;
  report.source = spec.name;
  report.dim = config.dim;
  report.learn_weights = config.learn_weights;
  report.models = {{"gecov", 0.0, {}, geo.report}, {"eucov", 0.0, {}, euc.report}, {"ppca", 0.0, {}, std::nullopt}};
  for (const auto& r : results) {
    for (std::size_t k = 0; k < models.size(); ++k) report.models[k].scores.push_back(r.average_ll[k]);
  }
  finish(report);
  return report;
}

ComparisonReport compare_coordinates(const DataMatrix& data, const Manifold& manifold, const CompareConfig& config) {
  FitConfig fc;
  fc.dim = config.dim;
  fc.landmarks = pick(config.landmarks, 500);
  fc.max_iters = pick(config.iters, 20);
  fc.elbo_tol = config.tol;
  fc.seed = derive_seed(config.seed, 3);
  fc.learn_weights = config.learn_weights;
  fc.restarts = config.restarts;

  const auto folds = kfold_indices(data.rows(), config.folds, config.shuffle, derive_seed(config.seed, 4));
  std::vector<char> in_test(static_cast<std::size_t>(data.rows()));

  ComparisonReport report;
  report.source = "data";
  report.dim = config.dim;
  report.learn_weights = config.learn_weights;
  report.models = {{"gecov", 0.0, {}, std::nullopt}, {"eucov", 0.0, {}, std::nullopt}, {"ppca", 0.0, {}, std::nullopt}};

  const CoordinateField geo_field = CoordinateField::geometric(manifold);
  const CoordinateField euc_field = CoordinateField::euclidean();
  for (const auto& test_rows : folds) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (auto r : test_rows) in_test[static_cast<std::size_t>(r)] = 1;
    std::vector<Eigen::Index> train_rows;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      if (!in_test[static_cast<std::size_t>(r)]) train_rows.push_back(r);
    }
    const DataMatrix train = take_rows(data, train_rows);
    const DataMatrix test = take_rows(data, test_rows);

    FitResult geo = fit(train, manifold, geo_field, fc);
    FitResult euc = fit(train, manifold, euc_field, fc);
    const PpcaModel lin = fit_ppca(train, config.dim);
    const std::vector<AnyModel> models{geo.model, euc.model, lin};
    for (std::size_t k = 0; k < models.size(); ++k) {
      const auto s = to_std(model_sample_log_likelihoods(models[k], test));
      report.models[k].scores.insert(report.models[k].scores.end(), s.begin(), s.end());
    }
    if (!report.models[0].report) {
      report.models[0].report = geo.report;
      report.models[1].report = euc.report;
    }
  }
  finish(report);
  return report;
}

std::vector<ColumnPlan> table2_plans() {
  return {
      {"loop2d/gecov", CoordKind::Geometric, {"loop2d-gecov"}, {true}},
      {"loop2d/eucov", CoordKind::Euclidean, {"loop2d-eucov"}, {true}},
      {"loop10d/gecov", CoordKind::Geometric, {"loop10d-gecov"}, {true}},
      {"loop10d/eucov", CoordKind::Euclidean, {"loop10d-eucov"}, {true}},
      {"torus/gecov", CoordKind::Geometric, {"torus-uniang-gecov", "torus-unitorus-gecov"}, {false, true}},
      {"torus/eucov", CoordKind::Euclidean, {"torus-uniang-eucov", "torus-unitorus-eucov"}, {false, true}},
  };
}

GridColumn run_column(const ColumnPlan& plan, const CompareConfig& base, std::uint64_t seed) {
  GridColumn col;
  col.label = plan.label;
  col.true_coords = to_string(plan.true_coords);
  for (std::size_t s = 0; s < plan.specs.size(); ++s) {
    const TrueModelSpec& spec = standard_spec(plan.specs[s]);
    for (bool learn : plan.learn_weights) {
      CompareConfig cfg = base;
      cfg.dim = spec.manifold.ambient_dim();
      cfg.learn_weights = learn;
      cfg.seed = derive_seed(seed, 100 + s);
      col.runs.push_back(compare_coordinates(spec, cfg));
    }
  }
  for (const auto& r : col.runs) {
    col.gecov += r.score("gecov").mean_ll;
    col.eucov += r.score("eucov").mean_ll;
    col.ppca += r.score("ppca").mean_ll;
  }
  const auto runs = static_cast<double>(col.runs.size());
  col.gecov /= runs;
  col.eucov /= runs;
  col.ppca /= runs;
  return col;
}

}  // namespace pgpca
