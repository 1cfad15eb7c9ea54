#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pgpca/landmarks.hpp"
#include "pgpca/manifold.hpp"

namespace pgpca {

/// Rule assigning an orthonormal n x n distribution coordinate K(z) to every
/// manifold state.
class CoordinateField {
 public:
  enum class Kind { Euclidean, GeometricCurve, GeometricTorus, Custom };
  using Rule = std::function<Matrix(const Manifold&, const State&)>;

  /// K(z) = I_n.
  static CoordinateField euclidean();
  /// Tangent-based frame: GeometricTorus on 2-d manifolds, GeometricCurve otherwise.
  static CoordinateField geometric(const Manifold& manifold);
  static CoordinateField geometric_curve();
  static CoordinateField geometric_torus();
  /// Any user rule; it must return orthonormal matrices.
  static CoordinateField custom(std::string name, Rule rule);

  Kind kind() const { return kind_; }
  /// "eucov", "gecov" or the custom name.
  const std::string& name() const { return name_; }
  bool is_euclidean() const { return kind_ == Kind::Euclidean; }

  Matrix frame(const Manifold& manifold, const State& z) const;

 private:
  CoordinateField(Kind kind, std::string name, Rule rule = {})
      : kind_(kind), name_(std::move(name)), rule_(std::move(rule)) {}

  Kind kind_;
  std::string name_;
  Rule rule_;
};

/// Gram-Schmidt completion of a single direction to an orthonormal basis of
/// R^n: column 0 is `lead` normalized, the rest come from e_1..e_n in index
/// order, skipping candidates whose residual norm falls below 1e-8.
Matrix gram_schmidt_frame(const Vector& lead);

/// One frame per landmark, computed once.
std::vector<Matrix> landmark_frames(const CoordinateField& field, const Manifold& manifold,
                                    const LandmarkSet& landmarks);

inline constexpr double kGramSchmidtSkip = 1e-8;

}  // namespace pgpca
