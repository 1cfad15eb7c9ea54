#pragma once

#include <cstdint>
#include <vector>

#include "pgpca/types.hpp"

namespace pgpca {

struct KMeansResult {
  Matrix centers;                       // k x n
  std::vector<int> labels;              // one per sample
  std::vector<double> objective_trace;  // sum of squared distances after each assignment step
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding. Stops when no center moves more
/// than `tol` or after `max_iters` iterations. An empty cluster is re-seeded
/// with the sample farthest from its current center.
KMeansResult kmeans(const DataMatrix& data, int k, std::uint64_t seed, int max_iters = 300, double tol = 1e-8);

}  // namespace pgpca
