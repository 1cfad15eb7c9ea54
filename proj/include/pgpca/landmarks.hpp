#pragma once

#include <vector>

#include "pgpca/manifold.hpp"

namespace pgpca {

/// Discretization of p(z): landmark states with nonnegative weights summing to 1.
struct LandmarkSet {
  std::vector<State> points;
  Vector weights;

  std::size_t size() const { return points.size(); }
  /// Throws InvalidArgument unless weights are nonnegative, finite and sum to 1 (1e-12).
  void validate() const;
};

/// Uniform parameter grid over the manifold domain with uniform weights. On
/// the torus a ceil(sqrt(M)) x ceil(sqrt(M)) grid is laid out z1-major and
/// truncated to the first M points.
LandmarkSet make_landmarks(const Manifold& manifold, int count);

}  // namespace pgpca
