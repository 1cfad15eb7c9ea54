#pragma once

#include <vector>

namespace pgpca {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
  int dof = 0;
};

/// Differences no larger than this fraction of max |a|, |b| count as ties.
inline constexpr double kTiedRelative = 1e-12;

/// Paired t-test on a - b with len - 1 degrees of freedom. All-zero
/// differences (after the tie rule) give t = 0, p = 1; zero variance with a
/// nonzero mean gives t = +-inf, p = 0.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);

}  // namespace pgpca
