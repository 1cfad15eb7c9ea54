#include "pgpca/landmarks.hpp"

#include <cmath>

#include "pgpca/error.hpp"

namespace pgpca {

void LandmarkSet::validate() const {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "landmark set is empty");
  if (static_cast<std::size_t>(weights.size()) != points.size()) {
    throw Error(ErrorKind::DimensionMismatch, "landmark weights and points differ in length");
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidArgument, "landmark weights must be finite and nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "landmark weights must sum to 1");
  }
}

LandmarkSet make_landmarks(const Manifold& manifold, int count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "landmark count must be at least 1");
  const auto periods = manifold.periods();
  LandmarkSet set;
  set.points.reserve(count);
  if (manifold.intrinsic_dim() == 1) {
    for (int j = 0; j < count; ++j) {
      State z(1);
      z[0] = periods[0] * j / count;
      set.points.push_back(z);
    }
  } else {
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    for (int a = 0; a < side && static_cast<int>(set.points.size()) < count; ++a) {
      for (int b = 0; b < side && static_cast<int>(set.points.size()) < count; ++b) {
        State z(2);
        z << periods[0] * a / side, periods[1] * b / side;
        set.points.push_back(z);
      }
    }
  }
  set.weights = Vector::Constant(count, 1.0 / count);
  return set;
}

}  // namespace pgpca
