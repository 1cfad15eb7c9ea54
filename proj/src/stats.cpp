#include "pgpca/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "pgpca/error.hpp"

namespace pgpca {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "paired samples differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw Error(ErrorKind::InsufficientData, "paired t-test needs at least 2 pairs");
  const auto len = a.size();
  std::vector<double> diff(len);
  double scale = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    diff[i] = a[i] - b[i];
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    largest = std::max(largest, std::abs(diff[i]));
  }
  // Differences at rounding level carry no evidence either way.
  if (largest <= kTiedRelative * scale) diff.assign(len, 0.0);
  const double mu = mean(diff);
  double ss = 0.0;
  for (double d : diff) ss += (d - mu) * (d - mu);
  const double sd = std::sqrt(ss / static_cast<double>(len - 1));

  TTestResult out;
  out.dof = static_cast<int>(len - 1);
  if (sd == 0.0) {
    if (mu == 0.0) return out;
    out.t = mu > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.t = mu / (sd / std::sqrt(static_cast<double>(len)));
  const boost::math::students_t dist(static_cast<double>(out.dof));
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
  return out;
}

}  // namespace pgpca
