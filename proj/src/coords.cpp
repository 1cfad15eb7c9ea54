#include "pgpca/coords.hpp"

#include "pgpca/error.hpp"

namespace pgpca {

CoordinateField CoordinateField::euclidean() { return CoordinateField(Kind::Euclidean, "eucov"); }

CoordinateField CoordinateField::geometric(const Manifold& manifold) {
  return manifold.intrinsic_dim() == 2 ? geometric_torus() : geometric_curve();
}

CoordinateField CoordinateField::geometric_curve() { return CoordinateField(Kind::GeometricCurve, "gecov"); }

CoordinateField CoordinateField::geometric_torus() { return CoordinateField(Kind::GeometricTorus, "gecov"); }

CoordinateField CoordinateField::custom(std::string name, Rule rule) {
  if (!rule) throw Error(ErrorKind::InvalidArgument, "custom coordinate field needs a rule");
  return CoordinateField(Kind::Custom, std::move(name), std::move(rule));
}

Matrix gram_schmidt_frame(const Vector& lead) {
  const auto n = lead.size();
  const double norm = lead.norm();
  if (!(norm >= kDegenerateTangentNorm)) throw Error(ErrorKind::DegenerateFrame, "leading vector vanishes");
  Matrix k(n, n);
  k.col(0) = lead / norm;
  Eigen::Index filled = 1;
  for (Eigen::Index e = 0; e < n && filled < n; ++e) {
    Vector r = Vector::Unit(n, e);
    // Two projection sweeps keep the frame orthonormal to rounding.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (Eigen::Index c = 0; c < filled; ++c) r -= k.col(c).dot(r) * k.col(c);
    }
    const double rn = r.norm();
    if (rn < kGramSchmidtSkip) continue;
    k.col(filled++) = r / rn;
  }
  if (filled < n) throw Error(ErrorKind::DegenerateFrame, "could not complete an orthonormal frame");
  return k;
}

Matrix CoordinateField::frame(const Manifold& manifold, const State& z) const {
  const int n = manifold.ambient_dim();
  switch (kind_) {
    case Kind::Euclidean:
      return Matrix::Identity(n, n);
    case Kind::GeometricCurve: {
      if (manifold.intrinsic_dim() != 1) {
        throw Error(ErrorKind::InvalidArgument, "curve frames need a 1-d manifold");
      }
      return gram_schmidt_frame(manifold.tangent(z).col(0));
    }
    case Kind::GeometricTorus: {
      if (manifold.intrinsic_dim() != 2 || n != 3) {
        throw Error(ErrorKind::InvalidArgument, "torus frames need a 2-d surface in R^3");
      }
      const Matrix t = manifold.tangent(z);
      const Eigen::Vector3d u = t.col(0).normalized();
      const Eigen::Vector3d v = t.col(1).normalized();
      const Eigen::Vector3d w = u.cross(v);
      if (w.norm() < kGramSchmidtSkip) throw Error(ErrorKind::DegenerateFrame, "torus tangents are parallel");
      Matrix k(3, 3);
      k.col(0) = u;
      k.col(1) = v;
      k.col(2) = w.normalized();
      return k;
    }
    case Kind::Custom: {
      Matrix k = rule_(manifold, z);
      if (k.rows() != n || k.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "custom frame has the wrong shape");
      }
      return k;
    }
  }
  return Matrix::Identity(n, n);
}

std::vector<Matrix> landmark_frames(const CoordinateField& field, const Manifold& manifold,
                                    const LandmarkSet& landmarks) {
  std::vector<Matrix> frames;
  frames.reserve(landmarks.size());
  for (const auto& z : landmarks.points) frames.push_back(field.frame(manifold, z));
  return frames;
}

}  // namespace pgpca
