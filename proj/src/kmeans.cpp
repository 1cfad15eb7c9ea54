#include "pgpca/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "pgpca/error.hpp"
#include "pgpca/parallel.hpp"

namespace pgpca {
namespace {

// Nearest center and squared distance for every sample.
void assign(const DataMatrix& data, const Matrix& centers, std::vector<int>& labels, std::vector<double>& dist2) {
  const auto t = static_cast<std::size_t>(data.rows());
  parallel_for_blocks(block_count(t), [&](std::size_t b) {
    const std::size_t end = std::min(t, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        const double d = (data.row(i) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      labels[i] = arg;
      dist2[i] = best;
    }
  });
}

}  // namespace

KMeansResult kmeans(const DataMatrix& data, int k, std::uint64_t seed, int max_iters, double tol) {
  const auto t = static_cast<Eigen::Index>(data.rows());
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (t < k) {
    throw Error(ErrorKind::InsufficientData,
                "k-means needs at least k=" + std::to_string(k) + " samples, got " + std::to_string(t));
  }
  if (!data.allFinite()) throw Error(ErrorKind::NonFiniteInput, "data contain non-finite values");

  std::mt19937_64 rng(seed);
  Matrix centers(k, data.cols());

  // k-means++ seeding.
  std::uniform_int_distribution<Eigen::Index> pick(0, t - 1);
  centers.row(0) = data.row(pick(rng));
  std::vector<double> d2(t);
  for (Eigen::Index i = 0; i < t; ++i) d2[i] = (data.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = t - 1;
      for (Eigen::Index i = 0; i < t; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = data.row(chosen);
    for (Eigen::Index i = 0; i < t; ++i) d2[i] = std::min(d2[i], (data.row(i) - centers.row(c)).squaredNorm());
  }

  KMeansResult result;
  result.labels.assign(t, 0);
  std::vector<double> dist2(t);
  for (int iter = 0; iter < max_iters; ++iter) {
    assign(data, centers, result.labels, dist2);
    double objective = 0.0;
    for (double v : dist2) objective += v;
    result.objective_trace.push_back(objective);

    Matrix sums = Matrix::Zero(k, data.cols());
    std::vector<Eigen::Index> counts(k, 0);
    for (Eigen::Index i = 0; i < t; ++i) {
      sums.row(result.labels[i]) += data.row(i);
      ++counts[result.labels[i]];
    }
    // Re-seed empty clusters at the worst-served samples.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      const auto far = static_cast<Eigen::Index>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
      const int old = result.labels[far];
      sums.row(old) -= data.row(far);
      --counts[old];
      sums.row(c) = data.row(far);
      counts[c] = 1;
      result.labels[far] = c;
      dist2[far] = 0.0;
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      const Eigen::RowVectorXd updated = sums.row(c) / static_cast<double>(counts[c]);
      shift = std::max(shift, (updated - centers.row(c)).norm());
      centers.row(c) = updated;
    }
    result.iterations = iter + 1;
    if (shift < tol) {
      result.converged = true;
      break;
    }
  }
  assign(data, centers, result.labels, dist2);
  result.centers = std::move(centers);
  return result;
}

}  // namespace pgpca
