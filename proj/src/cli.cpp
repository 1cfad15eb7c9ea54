#include "pgpca/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pgpca/error.hpp"
#include "pgpca/eval.hpp"
#include "pgpca/io.hpp"
#include "pgpca/parallel.hpp"
#include "pgpca/spline_fit.hpp"

namespace pgpca::cli {
namespace {

using io::Json;

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("PGPCA_SEED"); env && *env) {
      char* end = nullptr;
      const auto v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw CLI::ValidationError("PGPCA_SEED", "must be an unsigned integer, got '" + std::string(env) + "'");
      return v;
    }
    return 0;
  }
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Base seed for all randomness (fallback: $PGPCA_SEED, then 0)");
  sub->add_option("--threads", common.threads, "Worker thread cap; 0 uses all cores. Output does not depend on it");
  sub->add_option("--config", "JSON file with flag values; command-line flags take precedence");
}

CoordinateField coords_by_name(const std::string& name, const Manifold& manifold) {
  if (name == "gecov") return CoordinateField::geometric(manifold);
  return CoordinateField::euclidean();
}

/// "a..b", "a..n" (n: ambient dimension), "a,b,c" or a single value.
std::vector<int> parse_dims(const std::string& text, int n) {
  auto number = [&](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s == "n") return n;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw CLI::ValidationError("--dims", "cannot parse '" + s + "'");
    return v;
  };
  std::vector<int> dims;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = number(text.substr(0, dots));
    const int hi = number(text.substr(dots + 2));
    for (int d = lo; d <= hi; ++d) dims.push_back(d);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      dims.push_back(number(text.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  if (dims.empty()) throw CLI::ValidationError("--dims", "empty range '" + text + "'");
  for (int d : dims) {
    if (d < 0 || d > n) {
      throw CLI::ValidationError("--dims", "dimension " + std::to_string(d) + " outside [0, " + std::to_string(n) + "]");
    }
  }
  return dims;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string out;
  std::string latents;
  int samples = 0;
  bool header = false;
};

int do_simulate(const SimulateArgs& a, const Common& c) {
  const TrueModelSpec& spec = standard_spec(a.spec);
  const int count = a.samples > 0 ? a.samples : spec.train_samples;
  const SampleResult s = sample(spec, count, derive_seed(c.resolved_seed(), 1));
  std::vector<std::string> y_header;
  std::vector<std::string> z_header;
  if (a.header) {
    for (Eigen::Index k = 0; k < s.data.cols(); ++k) y_header.push_back("y" + std::to_string(k + 1));
    for (Eigen::Index k = 0; k < s.latents.cols(); ++k) z_header.push_back("z" + std::to_string(k + 1));
  }
  io::write_csv(a.out, s.data, y_header);
  if (!a.latents.empty()) io::write_csv(a.latents, s.latents, z_header);
  std::printf("wrote %d samples of %s to %s\n", count, spec.name.c_str(), a.out.c_str());
  return kExitOk;
}

// ---- fit-manifold ----------------------------------------------------------

struct FitManifoldArgs {
  std::string data;
  std::string out;
  int knots = 10;
};

int do_fit_manifold(const FitManifoldArgs& a, const Common& c) {
  const DataMatrix data = io::read_csv(a.data);
  const Manifold m = fit_closed_spline(data, a.knots, c.resolved_seed());
  io::write_json(a.out, io::to_json(m));
  const auto& spline = std::get<ClosedSpline>(m.variant());
  std::printf("closed spline with %d knots in R^%d, length %.6g\n", spline.segments(), spline.ambient_dim(),
              spline.length());
  return kExitOk;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string manifold;
  std::string coords = "gecov";
  std::string out;
  std::string report;
  int dim = -1;
  int landmarks = 500;
  int iters = 20;
  double tol = 1e-7;
  int restarts = 1;
  bool fixed_weights = false;
};

int do_fit(const FitArgs& a, const Common& c) {
  const DataMatrix data = io::read_csv(a.data);
  const Manifold manifold = io::load_manifold(a.manifold);
  if (data.cols() != manifold.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "data has " + std::to_string(data.cols()) + " columns but the manifold lives in R^" +
                                                  std::to_string(manifold.ambient_dim()));
  }
  FitConfig cfg;
  cfg.dim = a.dim < 0 ? manifold.ambient_dim() : a.dim;
  cfg.landmarks = a.landmarks;
  cfg.max_iters = a.iters;
  cfg.elbo_tol = a.tol;
  cfg.seed = c.resolved_seed();
  cfg.learn_weights = !a.fixed_weights;
  cfg.restarts = a.restarts;
  const FitResult r = fit(data, manifold, coords_by_name(a.coords, manifold), cfg);
  io::write_json(a.out, io::to_json(r.model));
  if (!a.report.empty()) io::write_json(a.report, io::to_json(r.report));
  for (const auto& w : r.report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("iterations %d  converged %s  log-likelihood %.10g  per sample %.6f\n", r.report.iterations,
              r.report.converged ? "yes" : "no", r.report.final_log_likelihood,
              r.report.final_log_likelihood / static_cast<double>(data.rows()));
  return kExitOk;
}

// ---- ppca ------------------------------------------------------------------

struct PpcaArgs {
  std::string data;
  std::string out;
  int dim = -1;
};

int do_ppca(const PpcaArgs& a, const Common&) {
  const DataMatrix data = io::read_csv(a.data);
  const int m = a.dim < 0 ? static_cast<int>(data.cols()) : a.dim;
  const PpcaModel model = fit_ppca(data, m);
  io::write_json(a.out, io::to_json(model));
  const double ll = ppca_log_likelihood(model, data);
  std::printf("log-likelihood %.10g  per sample %.6f\n", ll, ll / static_cast<double>(data.rows()));
  return kExitOk;
}

// ---- loglik ----------------------------------------------------------------

struct LoglikArgs {
  std::string model;
  std::string data;
  std::string per_sample;
};

int do_loglik(const LoglikArgs& a, const Common&) {
  const Json doc = io::read_json(a.model);
  const AnyModel model = doc.contains("mean") ? AnyModel(io::ppca_model_from_json(doc))
                                              : AnyModel(io::pgpca_model_from_json(doc));
  const DataMatrix data = io::read_csv(a.data);
  const Vector ll = model_sample_log_likelihoods(model, data);
  if (!a.per_sample.empty()) io::write_csv(a.per_sample, Matrix(ll));
  std::printf("log-likelihood %.17g\nper sample %.17g\n", ll.sum(), ll.sum() / static_cast<double>(data.rows()));
  return kExitOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string spec;
  std::string data;
  std::string manifold;
  std::string dims;
  std::string out;
  int landmarks = 0;
  int iters = 0;
  double tol = 1e-7;
  int restarts = 1;
  int folds = 5;
  bool shuffle = false;
  int trials = 0;
  int trial_len = 0;
  int train_samples = 0;
  bool fixed_weights = false;
};

void print_comparison_header() {
  std::printf("%4s %12s %12s %12s  %-6s %10s\n", "dim", "gecov", "eucov", "ppca", "winner", "p");
}

void print_comparison_row(const ComparisonReport& r) {
  std::printf("%4d %12.6f %12.6f %12.6f  %-6s %10.3g\n", r.dim, r.score("gecov").mean_ll, r.score("eucov").mean_ll,
              r.score("ppca").mean_ll, r.winner.c_str(), r.coordinate_test.p);
}

int do_compare(const CompareArgs& a, const Common& c) {
  if (a.spec.empty() == a.data.empty()) throw CLI::ValidationError("compare", "give exactly one of --spec or --data");
  if (!a.data.empty() && a.manifold.empty()) throw CLI::ValidationError("compare", "--data needs --manifold");
  if (!a.spec.empty() && !a.manifold.empty()) {
    throw CLI::ValidationError("compare", "--manifold applies to --data only; a spec carries its own manifold");
  }

  CompareConfig cfg;
  cfg.landmarks = a.landmarks;
  cfg.iters = a.iters;
  cfg.tol = a.tol;
  cfg.restarts = a.restarts;
  cfg.folds = a.folds;
  cfg.shuffle = a.shuffle;
  cfg.trials = a.trials;
  cfg.trial_len = a.trial_len;
  cfg.train_samples = a.train_samples;
  cfg.learn_weights = !a.fixed_weights;
  cfg.seed = c.resolved_seed();

  std::optional<DataMatrix> data;
  std::optional<Manifold> manifold;
  const TrueModelSpec* spec = nullptr;
  int n = 0;
  if (!a.spec.empty()) {
    spec = &standard_spec(a.spec);
    n = spec->manifold.ambient_dim();
  } else {
    data = io::read_csv(a.data);
    manifold = io::load_manifold(a.manifold);
    n = manifold->ambient_dim();
    if (data->cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "data has " + std::to_string(data->cols()) +
                                                    " columns but the manifold lives in R^" + std::to_string(n));
    }
  }
  const std::vector<int> dims = a.dims.empty() ? std::vector<int>{n} : parse_dims(a.dims, n);

  Json reports = Json::array();
  Json curves = {{"dims", dims}, {"gecov", Json::array()}, {"eucov", Json::array()}, {"ppca", Json::array()}};
  print_comparison_header();
  for (int d : dims) {
    cfg.dim = d;
    const ComparisonReport r = spec ? compare_coordinates(*spec, cfg) : compare_coordinates(*data, *manifold, cfg);
    print_comparison_row(r);
    for (const char* name : {"gecov", "eucov", "ppca"}) curves[name].push_back(r.score(name).mean_ll);
    reports.push_back(io::to_json(r));
  }
  if (!a.out.empty()) {
    Json doc;
    doc["source"] = spec ? spec->name : a.data;
    doc["seed"] = cfg.seed;
    doc["curves"] = curves;
    doc["reports"] = reports;
    // Table-style summary: the highest dimension compared.
    doc["grid"] = {{"dim", dims.back()},
                   {"gecov", curves["gecov"].back()},
                   {"eucov", curves["eucov"].back()},
                   {"ppca", curves["ppca"].back()}};
    io::write_json(a.out, doc);
  }
  return kExitOk;
}

// ---- reproduce -------------------------------------------------------------

struct ReproduceArgs {
  std::string target;
  std::string out;
  std::vector<std::string> columns;
  int landmarks = 0;
  int iters = 0;
  int trials = 0;
  int trial_len = 0;
  int train_samples = 0;
};

int do_reproduce(const ReproduceArgs& a, const Common& c) {
  if (a.target != "table2-sim") throw CLI::ValidationError("reproduce", "unknown target '" + a.target + "' (known: table2-sim)");
  CompareConfig base;
  base.landmarks = a.landmarks;
  base.iters = a.iters;
  base.trials = a.trials;
  base.trial_len = a.trial_len;
  base.train_samples = a.train_samples;
  const std::uint64_t seed = c.resolved_seed();

  std::vector<ColumnPlan> plans;
  for (const auto& plan : table2_plans()) {
    if (a.columns.empty() || std::find(a.columns.begin(), a.columns.end(), plan.label) != a.columns.end()) {
      plans.push_back(plan);
    }
  }
  if (plans.empty()) throw CLI::ValidationError("--columns", "no column matches");

  std::vector<GridColumn> grid;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    std::fprintf(stderr, "running %s\n", plans[k].label.c_str());
    grid.push_back(run_column(plans[k], base, derive_seed(seed, 1000 + k)));
  }

  std::printf("%-8s", "fit");
  for (const auto& col : grid) std::printf(" %15s", col.label.c_str());
  std::printf("\n");
  for (const char* row : {"gecov", "eucov", "ppca"}) {
    std::printf("%-8s", row);
    for (const auto& col : grid) {
      const double v = std::string(row) == "gecov" ? col.gecov : std::string(row) == "eucov" ? col.eucov : col.ppca;
      std::printf(" %15.3f", v);
    }
    std::printf("\n");
  }
  std::printf("%-8s", "p");
  for (const auto& col : grid) {
    double worst = 0.0;
    for (const auto& r : col.runs) worst = std::max(worst, r.coordinate_test.p);
    std::printf(" %15.3g", worst);
  }
  std::printf("\n");

  if (!a.out.empty()) {
    Json doc;
    doc["seed"] = seed;
    doc["columns"] = Json::array();
    for (const auto& col : grid) doc["columns"].push_back(io::to_json(col));
    io::write_json(a.out, doc);
  }
  return kExitOk;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;

  const Json doc = io::read_json(path);
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "config '" + path + "' must hold a JSON object");
  auto present = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& s) { return s == flag || s.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };

  std::vector<std::string> out = args;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& item : value) {
        out.push_back(flag);
        out.push_back(scalar(item));
      }
    } else if (!value.is_null()) {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"Probabilistic geometric PCA: fit, compare and simulate models of data around a manifold", "pgpca"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> spec_names;
  for (const auto& s : standard_specs()) spec_names.push_back(s.name);
  const auto coords_check = CLI::IsMember({"eucov", "gecov"});

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw samples from a standard simulation model");
  simulate->add_option("--spec", sim.spec, "Model name")->required()->check(CLI::IsMember(spec_names));
  simulate->add_option("--out", sim.out, "Output CSV for the samples")->required();
  simulate->add_option("--latents", sim.latents, "Optional CSV for the latent states");
  simulate->add_option("--samples", sim.samples, "Sample count (default: the model's training size)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_flag("--header", sim.header, "Write a header row");
  add_common(simulate, common);

  FitManifoldArgs fm;
  auto* fit_manifold = app.add_subcommand("fit-manifold", "Fit a closed cubic spline through k-means knots");
  fit_manifold->add_option("--data", fm.data, "Input CSV")->required()->check(CLI::ExistingFile);
  fit_manifold->add_option("--knots", fm.knots, "Knot count")->check(CLI::Range(3, 20));
  fit_manifold->add_option("--out", fm.out, "Output manifold JSON")->required();
  add_common(fit_manifold, common);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a PGPCA model with EM");
  fit_cmd->add_option("--data", fa.data, "Input CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--manifold", fa.manifold, "ellipse, torus or a manifold JSON file")->required();
  fit_cmd->add_option("--coords", fa.coords, "Distribution coordinates")->check(coords_check);
  fit_cmd->add_option("--dim", fa.dim, "Model dimension m (default: full rank)");
  fit_cmd->add_option("--landmarks", fa.landmarks, "Landmark count M")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--iters", fa.iters, "Maximum EM iterations")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tol", fa.tol, "Relative ELBO improvement threshold")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--restarts", fa.restarts, "Independent initializations; best final fit wins")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--fixed-weights", fa.fixed_weights, "Keep the uniform landmark weights");
  fit_cmd->add_option("--out", fa.out, "Output model JSON")->required();
  fit_cmd->add_option("--report", fa.report, "Output fit report JSON");
  add_common(fit_cmd, common);

  PpcaArgs pa;
  auto* ppca = app.add_subcommand("ppca", "Fit the PPCA baseline");
  ppca->add_option("--data", pa.data, "Input CSV")->required()->check(CLI::ExistingFile);
  ppca->add_option("--dim", pa.dim, "Model dimension m (default: full rank)");
  ppca->add_option("--out", pa.out, "Output model JSON")->required();
  add_common(ppca, common);

  LoglikArgs la;
  auto* loglik = app.add_subcommand("loglik", "Score data under a saved PGPCA or PPCA model");
  loglik->add_option("--model", la.model, "Model JSON")->required()->check(CLI::ExistingFile);
  loglik->add_option("--data", la.data, "Input CSV")->required()->check(CLI::ExistingFile);
  loglik->add_option("--per-sample", la.per_sample, "Optional CSV of per-sample log-likelihoods");
  add_common(loglik, common);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "GeCOV vs EuCOV vs PPCA on a simulation model or on data");
  compare->add_option("--spec", ca.spec, "Simulation model name")->check(CLI::IsMember(spec_names));
  compare->add_option("--data", ca.data, "Input CSV (k-fold cross-validation)")->check(CLI::ExistingFile);
  compare->add_option("--manifold", ca.manifold, "ellipse, torus or a manifold JSON file (with --data)");
  compare->add_option("--dims", ca.dims, "Model dimensions: a..b, a..n, a,b,c or one value (default: n)");
  compare->add_option("--landmarks", ca.landmarks, "Landmark count M (0: default)")->check(CLI::NonNegativeNumber);
  compare->add_option("--iters", ca.iters, "EM iterations (0: default)")->check(CLI::NonNegativeNumber);
  compare->add_option("--tol", ca.tol, "Relative ELBO improvement threshold")->check(CLI::NonNegativeNumber);
  compare->add_option("--restarts", ca.restarts, "EM initializations per fit")->check(CLI::PositiveNumber);
  compare->add_option("--folds", ca.folds, "Cross-validation folds (with --data)")->check(CLI::Range(2, 1000));
  compare->add_flag("--shuffle", ca.shuffle, "Shuffle samples before splitting folds");
  compare->add_option("--trials", ca.trials, "Test trials (0: default)")->check(CLI::NonNegativeNumber);
  compare->add_option("--trial-len", ca.trial_len, "Samples per test trial (0: default)")->check(CLI::NonNegativeNumber);
  compare->add_option("--train-samples", ca.train_samples, "Training samples (0: default)")
      ->check(CLI::NonNegativeNumber);
  compare->add_flag("--fixed-weights", ca.fixed_weights,
                    "Do not learn landmark weights (spec: true p(z) given; data: uniform)");
  compare->add_option("--out", ca.out, "Output report JSON");
  add_common(compare, common);

  ReproduceArgs ra;
  auto* reproduce = app.add_subcommand("reproduce", "Rerun the standard simulation grid end to end");
  reproduce->add_option("target", ra.target, "Experiment name (table2-sim)")->required();
  reproduce->add_option("--columns", ra.columns, "Restrict to these column labels, e.g. loop2d/gecov");
  reproduce->add_option("--landmarks", ra.landmarks, "Override landmark count")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--iters", ra.iters, "Override EM iterations")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--trials", ra.trials, "Override test trials")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--trial-len", ra.trial_len, "Override trial length")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--train-samples", ra.train_samples, "Override training samples")
      ->check(CLI::NonNegativeNumber);
  reproduce->add_option("--out", ra.out, "Output grid JSON");
  add_common(reproduce, common);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    set_thread_count(common.threads);

    if (*simulate) return do_simulate(sim, common);
    if (*fit_manifold) return do_fit_manifold(fm, common);
    if (*fit_cmd) return do_fit(fa, common);
    if (*ppca) return do_ppca(pa, common);
    if (*loglik) return do_loglik(la, common);
    if (*compare) return do_compare(ca, common);
    if (*reproduce) return do_reproduce(ra, common);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args);
}

}  // namespace pgpca::cli
