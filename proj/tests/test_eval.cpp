#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "pgpca/error.hpp"
#include "pgpca/eval.hpp"

using namespace pgpca;

// ---- paired t-test ---------------------------------------------------------

TEST(TTest, IdenticalGroups) {
  const std::vector<double> a{1.0, 2.0, 3.5, -1.0};
  const auto r = paired_t_test(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_EQ(r.dof, 3);
}

TEST(TTest, ConstantNonzeroDifference) {
  const auto r = paired_t_test({2, 3, 4, 5}, {1, 2, 3, 4});
  EXPECT_TRUE(std::isinf(r.t));
  EXPECT_GT(r.t, 0);
  EXPECT_LT(r.p, 1e-15);
}

TEST(TTest, WorkedExample) {
  const std::vector<double> diff{1.1, 0.9, 1.0, 1.2, 0.8};
  const std::vector<double> zero(5, 0.0);
  const auto r = paired_t_test(diff, zero);
  const double s = std::sqrt(0.1 / 4);  // sample sd of the differences
  EXPECT_NEAR(s, 0.15811388300841897, 1e-15);
  EXPECT_NEAR(r.t, std::sqrt(5.0) / s, 1e-12);
  EXPECT_NEAR(r.t, 14.142135623730951, 1e-10);
  const double reference = oracle::t_two_sided_p(r.t, 4);
  EXPECT_NEAR(r.p, reference, 1e-6 * reference);
  EXPECT_NEAR(r.p, 1.45e-4, 0.01e-4);
}

TEST(TTest, AgreesWithIntegratedCdf) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    const int len = 4 + trial;
    std::vector<double> a(len);
    std::vector<double> b(len);
    for (int k = 0; k < len; ++k) {
      a[k] = normal(rng) + 0.4;
      b[k] = normal(rng);
    }
    const auto r = paired_t_test(a, b);
    const double reference = oracle::t_two_sided_p(r.t, len - 1);
    EXPECT_NEAR(r.p, reference, 1e-7 * std::max(reference, 1e-3));
  }
}

TEST(TTest, Antisymmetry) {
  const std::vector<double> a{0.3, 1.7, 2.2, -0.4, 0.9};
  const std::vector<double> b{0.1, 1.1, 2.5, -0.9, 0.2};
  const auto ab = paired_t_test(a, b);
  const auto ba = paired_t_test(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);
}

TEST(TTest, InputErrors) {
  try {
    paired_t_test({1, 2, 3}, {1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
  EXPECT_THROW(paired_t_test({1}, {2}), Error);
}

// ---- folds -----------------------------------------------------------------

TEST(Folds, PartitionTheSamples) {
  for (bool shuffle : {false, true}) {
    for (Eigen::Index count : {10, 17, 1000}) {
      const auto folds = kfold_indices(count, 5, shuffle, 3);
      ASSERT_EQ(folds.size(), 5u);
      std::set<Eigen::Index> seen;
      std::size_t total = 0;
      for (const auto& f : folds) {
        EXPECT_GE(f.size(), static_cast<std::size_t>(count / 5));
        EXPECT_LE(f.size(), static_cast<std::size_t>(count / 5 + 1));
        total += f.size();
        seen.insert(f.begin(), f.end());
      }
      EXPECT_EQ(total, static_cast<std::size_t>(count));
      EXPECT_EQ(seen.size(), static_cast<std::size_t>(count));
      EXPECT_EQ(*seen.begin(), 0);
      EXPECT_EQ(*seen.rbegin(), count - 1);
    }
  }
}

TEST(Folds, ContiguousByDefault) {
  const auto folds = kfold_indices(15, 5, false, 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t k = 0; k < folds[f].size(); ++k) EXPECT_EQ(folds[f][k], static_cast<Eigen::Index>(3 * f + k));
  }
  EXPECT_THROW(kfold_indices(3, 5, false, 0), Error);
}

// ---- trials ----------------------------------------------------------------

TEST(Trials, TrainingDataAverage) {
  const auto& spec = standard_spec("loop2d-gecov");
  const DataMatrix d = sample(spec, 500, 1).data;
  const PpcaModel p = fit_ppca(d, 2);
  EXPECT_NEAR(average_log_likelihood(p, d), ppca_log_likelihood(p, d) / 500.0, 1e-14);
}

TEST(Trials, IdenticalModelsGiveIdenticalScores) {
  const auto& spec = standard_spec("loop2d-gecov");
  const PpcaModel p = fit_ppca(sample(spec, 500, 2).data, 1);
  const auto results = evaluate_trials({p, p}, spec, 6, 300, 9);
  ASSERT_EQ(results.size(), 6u);
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& r : results) {
    EXPECT_EQ(r.trial_len, 300);
    a.push_back(r.average_ll[0]);
    b.push_back(r.average_ll[1]);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(paired_t_test(a, b).p, 1.0);
  // trials differ from one another and are reproducible
  EXPECT_NE(a[0], a[1]);
  const auto again = evaluate_trials({p}, spec, 6, 300, 9);
  EXPECT_EQ(again[3].average_ll[0], a[3]);
}

TEST(Trials, DimensionMismatch) {
  const PpcaModel p{Vector::Zero(3), Matrix::Zero(3, 0), 1.0};
  EXPECT_THROW(evaluate_trials({p}, standard_spec("loop2d-gecov"), 2, 10, 1), Error);
}

// ---- coordinate comparison -------------------------------------------------

namespace {

CompareConfig small_config() {
  CompareConfig cfg;
  cfg.dim = 2;
  cfg.landmarks = 60;
  cfg.iters = 4;
  cfg.trials = 4;
  cfg.trial_len = 300;
  cfg.train_samples = 800;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST(Compare, SpecRunIsDeterministic) {
  const auto& spec = standard_spec("loop2d-eucov");
  const auto a = compare_coordinates(spec, small_config());
  const auto b = compare_coordinates(spec, small_config());
  ASSERT_EQ(a.models.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.models[k].name, b.models[k].name);
    EXPECT_EQ(a.models[k].scores, b.models[k].scores);
  }
  EXPECT_EQ(a.coordinate_test.p, b.coordinate_test.p);
  EXPECT_EQ(a.models[0].scores.size(), 4u);
  EXPECT_EQ(a.source, "loop2d-eucov");
  EXPECT_TRUE(a.winner == "gecov" || a.winner == "eucov");
  EXPECT_TRUE(a.score("gecov").report.has_value());
  EXPECT_FALSE(a.score("ppca").report.has_value());
  EXPECT_THROW(a.score("fa"), Error);
}

TEST(Compare, WinnerHasTheHigherMean) {
  const auto r = compare_coordinates(standard_spec("loop2d-gecov"), small_config());
  const double g = r.score("gecov").mean_ll;
  const double e = r.score("eucov").mean_ll;
  EXPECT_EQ(r.winner, g >= e ? "gecov" : "eucov");
  EXPECT_EQ(r.significant, r.coordinate_test.p < kSignificance);
  EXPECT_NEAR(g, mean(r.score("gecov").scores), 1e-14);
}

TEST(Compare, IsotropicDataCannotSeparateCoordinates) {
  TrueModelSpec spec = standard_spec("loop2d-gecov");
  spec.lambda = Vector::Constant(2, 0.2);
  const DataMatrix d = sample(spec, 1000, 21).data;
  CompareConfig cfg;
  cfg.dim = 0;
  cfg.landmarks = 50;
  cfg.iters = 5;
  cfg.folds = 5;
  cfg.seed = 3;
  const auto r = compare_coordinates(d, spec.manifold, cfg);
  EXPECT_EQ(r.source, "data");
  ASSERT_EQ(r.score("gecov").scores.size(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i) {
    EXPECT_NEAR(r.score("gecov").scores[i], r.score("eucov").scores[i], 1e-9);
  }
  // the differences are rounding noise, so only the means are meaningful
  EXPECT_NEAR(r.score("gecov").mean_ll, r.score("eucov").mean_ll, 1e-9);
}

TEST(Compare, CrossValidationPoolsEverySample) {
  const DataMatrix d = sample(standard_spec("loop2d-eucov"), 600, 22).data;
  CompareConfig cfg;
  cfg.dim = 1;
  cfg.landmarks = 40;
  cfg.iters = 3;
  cfg.folds = 3;
  cfg.seed = 4;
  const auto r = compare_coordinates(d, Manifold::ellipse(), cfg);
  for (const auto& m : r.models) {
    ASSERT_EQ(m.scores.size(), 600u);
    EXPECT_NEAR(m.mean_ll, mean(m.scores), 1e-12);
  }
}

TEST(Compare, Table2Plans) {
  const auto plans = table2_plans();
  ASSERT_EQ(plans.size(), 6u);
  EXPECT_EQ(plans[0].label, "loop2d/gecov");
  EXPECT_EQ(plans[4].specs.size(), 2u);
  EXPECT_EQ(plans[4].learn_weights.size(), 2u);
  for (const auto& p : plans) {
    for (const auto& s : p.specs) EXPECT_EQ(standard_spec(s).coords, p.true_coords);
  }
}

TEST(TTest, RoundingLevelDifferencesAreTies) {
  const std::vector<double> a{-2.9, -3.1, -2.7, -3.0};
  std::vector<double> b = a;
  b[1] = std::nextafter(b[1], 0.0);
  b[3] = std::nextafter(b[3], -10.0);
  const auto r = paired_t_test(a, b);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p, 1.0);
  // a real difference just above the threshold is still tested
  b[1] = a[1] + 1e-9;
  EXPECT_LT(paired_t_test(a, b).p, 1.0);
}
