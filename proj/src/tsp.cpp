#include "pgpca/tsp.hpp"

#include <limits>

#include "pgpca/error.hpp"

namespace pgpca {

double tour_length(const Matrix& points, const std::vector<int>& order) {
  double len = 0.0;
  const std::size_t k = order.size();
  for (std::size_t i = 0; i < k; ++i) len += (points.row(order[i]) - points.row(order[(i + 1) % k])).norm();
  return len;
}

std::vector<int> tsp_order(const Matrix& points) {
  const int k = static_cast<int>(points.rows());
  if (k > kMaxTspPoints) {
    throw Error(ErrorKind::TooManyKnots,
                std::to_string(k) + " points exceed the exact solver limit of " + std::to_string(kMaxTspPoints));
  }
  if (k < 2) throw Error(ErrorKind::InsufficientData, "a tour needs at least 2 points");
  if (k <= 3) {
    std::vector<int> tour(k);
    for (int i = 0; i < k; ++i) tour[i] = i;
    return tour;
  }

  Matrix dist(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) dist(i, j) = (points.row(i) - points.row(j)).norm();

  // City 0 is the fixed start; subsets range over cities 1..k-1 (bit c-1).
  const int free_cities = k - 1;
  const std::size_t subsets = std::size_t{1} << free_cities;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(subsets * free_cities, kInf);
  std::vector<signed char> parent(subsets * free_cities, -1);
  auto at = [free_cities](std::size_t mask, int last) { return mask * free_cities + (last - 1); };

  for (int c = 1; c < k; ++c) cost[at(std::size_t{1} << (c - 1), c)] = dist(0, c);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    for (int last = 1; last < k; ++last) {
      if (!(mask & (std::size_t{1} << (last - 1)))) continue;
      const double base = cost[at(mask, last)];
      if (base == kInf) continue;
      for (int next = 1; next < k; ++next) {
        const std::size_t bit = std::size_t{1} << (next - 1);
        if (mask & bit) continue;
        const double cand = base + dist(last, next);
        double& slot = cost[at(mask | bit, next)];
        if (cand < slot) {
          slot = cand;
          parent[at(mask | bit, next)] = static_cast<signed char>(last);
        }
      }
    }
  }

  const std::size_t full = subsets - 1;
  double best = kInf;
  int last = 1;
  for (int c = 1; c < k; ++c) {
    const double total = cost[at(full, c)] + dist(c, 0);
    if (total < best) {
      best = total;
      last = c;
    }
  }

  std::vector<int> reversed;
  std::size_t mask = full;
  while (last > 0) {
    reversed.push_back(last);
    const int prev = parent[at(mask, last)];
    mask &= ~(std::size_t{1} << (last - 1));
    last = prev;
  }
  std::vector<int> tour{0};
  tour.insert(tour.end(), reversed.rbegin(), reversed.rend());
  if (tour[1] > tour.back()) {
    std::vector<int> flipped{0};
    flipped.insert(flipped.end(), tour.rbegin(), tour.rend() - 1);
    tour = std::move(flipped);
  }
  return tour;
}

}  // namespace pgpca
