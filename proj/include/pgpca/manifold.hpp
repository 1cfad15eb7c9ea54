#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pgpca/types.hpp"

namespace pgpca {

/// phi(z) = [a cos z, b sin z], z in [0, 2pi).
struct Ellipse2D {
  double a = 1.0;
  double b = 2.0;
};

/// phi(z) = [(R + r cos z2) cos z1, (R + r cos z2) sin z1, r sin z2].
struct TorusR3 {
  double major = 3.0;
  double minor = 1.0;
};

/// A single point, phi(z) = point for every z. This is the PPCA special case
/// (phi = mean); it has no tangent, so only Euclidean frames apply to it.
struct ConstantPoint {
  Vector point;
};

/// Closed (periodic) cubic spline through an ordered list of knots in R^n,
/// parameterized by cumulative chord length s in [0, L).
class ClosedSpline {
 public:
  /// Interpolates `knots` (one knot per row, already in tour order).
  /// `ordering` records where each row came from and is carried along for
  /// serialization only.
  static ClosedSpline through_knots(const Matrix& knots, std::vector<int> ordering = {});

  /// Rebuilds a spline from serialized pieces without refitting.
  static ClosedSpline from_parts(Matrix knots, std::vector<int> ordering, std::vector<double> breaks,
                                 Matrix coefficients);

  const Matrix& knots() const { return knots_; }
  const std::vector<int>& ordering() const { return ordering_; }
  /// Knot parameters s_0 = 0 < s_1 < ... < s_K = L.
  const std::vector<double>& breaks() const { return breaks_; }
  /// Rows 4k..4k+3 hold the power-basis coefficients of segment k, in
  /// t = s - s_k: value = c0 + c1 t + c2 t^2 + c3 t^3.
  const Matrix& coefficients() const { return coefficients_; }
  double length() const { return breaks_.back(); }
  int segments() const { return static_cast<int>(knots_.rows()); }
  int ambient_dim() const { return static_cast<int>(knots_.cols()); }

  /// Derivative of the given order (0..3) at s, wrapped into [0, L).
  Vector evaluate(double s, int order = 0) const;
  /// Same as evaluate() but on segment k at local offset t with no wrapping,
  /// so t = h_k reaches the seam from the left.
  Vector evaluate_segment(int k, double t, int order = 0) const;

 private:
  Matrix knots_;
  std::vector<int> ordering_;
  std::vector<double> breaks_;
  Matrix coefficients_;
};

/// The manifold phi: Omega_z -> R^n. All supported manifolds are closed, so
/// states outside the domain are wrapped periodically.
class Manifold {
 public:
  using Variant = std::variant<Ellipse2D, TorusR3, ClosedSpline, ConstantPoint>;

  Manifold(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static Manifold ellipse(double a = 1.0, double b = 2.0) { return Manifold(Ellipse2D{a, b}); }
  static Manifold torus(double major = 3.0, double minor = 1.0) { return Manifold(TorusR3{major, minor}); }
  static Manifold constant(Vector point) { return Manifold(ConstantPoint{std::move(point)}); }

  const Variant& variant() const { return v_; }
  std::string variant_name() const;

  int ambient_dim() const;
  int intrinsic_dim() const;
  /// Period of each intrinsic coordinate; Omega_z = prod [0, period_i).
  std::vector<double> periods() const;

  State wrap(const State& z) const;
  Vector evaluate(const State& z) const;
  /// Unnormalized tangent vectors as columns (n x l). Throws DegenerateTangent
  /// if any column has norm below 1e-12.
  Matrix tangent(const State& z) const;

 private:
  void check_state(const State& z) const;

  Variant v_;
};

inline constexpr double kDegenerateTangentNorm = 1e-12;

}  // namespace pgpca
