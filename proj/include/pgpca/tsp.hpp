#pragma once

#include <vector>

#include "pgpca/types.hpp"

namespace pgpca {

inline constexpr int kMaxTspPoints = 20;

/// Shortest closed tour through the rows of `points` (Euclidean), solved
/// exactly with Held-Karp dynamic programming. The tour starts at index 0 and
/// runs in the direction whose second element is the smaller index.
std::vector<int> tsp_order(const Matrix& points);

/// Length of the closed tour visiting `points` in `order`.
double tour_length(const Matrix& points, const std::vector<int>& order);

}  // namespace pgpca
