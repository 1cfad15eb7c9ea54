#pragma once

#include <cstdint>

#include "pgpca/manifold.hpp"

namespace pgpca {

/// Fits a closed loop to data: k-means centers become knots, an exact TSP
/// tour orders them, and a periodic cubic spline interpolates them in that
/// order (chord-length parameterized, domain [0, L)).
Manifold fit_closed_spline(const DataMatrix& data, int n_knots, std::uint64_t seed);

}  // namespace pgpca
