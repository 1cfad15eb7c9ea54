#include "pgpca/spline_fit.hpp"

#include "pgpca/error.hpp"
#include "pgpca/kmeans.hpp"
#include "pgpca/tsp.hpp"

namespace pgpca {

Manifold fit_closed_spline(const DataMatrix& data, int n_knots, std::uint64_t seed) {
  if (n_knots < 3) throw Error(ErrorKind::InvalidArgument, "a closed spline needs at least 3 knots");
  if (n_knots > kMaxTspPoints) {
    throw Error(ErrorKind::TooManyKnots, std::to_string(n_knots) + " knots exceed the limit of " +
                                             std::to_string(kMaxTspPoints));
  }
  const KMeansResult clusters = kmeans(data, n_knots, seed);
  const std::vector<int> order = tsp_order(clusters.centers);
  Matrix knots(n_knots, data.cols());
  for (int i = 0; i < n_knots; ++i) knots.row(i) = clusters.centers.row(order[i]);
  return Manifold(ClosedSpline::through_knots(knots, order));
}

}  // namespace pgpca
