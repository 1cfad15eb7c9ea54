#include "pgpca/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pgpca/error.hpp"

namespace pgpca {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double wrap_scalar(double x, double period) {
  double w = std::fmod(x, period);
  if (w < 0.0) w += period;
  if (w >= period) w = 0.0;
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClosedSpline

ClosedSpline ClosedSpline::through_knots(const Matrix& knots, std::vector<int> ordering) {
  const int k = static_cast<int>(knots.rows());
  const int n = static_cast<int>(knots.cols());
  if (k < 3) throw Error(ErrorKind::InsufficientData, "closed spline needs at least 3 knots");
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "knots must have at least one coordinate");
  if (!knots.allFinite()) throw Error(ErrorKind::NonFiniteInput, "knots contain non-finite values");

  std::vector<double> h(k);
  std::vector<double> breaks(k + 1, 0.0);
  for (int i = 0; i < k; ++i) {
    h[i] = (knots.row((i + 1) % k) - knots.row(i)).norm();
    if (h[i] < 1e-10) {
      throw Error(ErrorKind::DegenerateKnots,
                  "knots " + std::to_string(i) + " and " + std::to_string((i + 1) % k) + " coincide");
    }
    breaks[i + 1] = breaks[i] + h[i];
  }

  // Cyclic system for the second derivatives at the knots.
  Matrix a = Matrix::Zero(k, k);
  Matrix rhs(k, n);
  for (int i = 0; i < k; ++i) {
    const int prev = (i + k - 1) % k;
    const int next = (i + 1) % k;
    a(i, prev) += h[prev];
    a(i, i) += 2.0 * (h[prev] + h[i]);
    a(i, next) += h[i];
    rhs.row(i) = 6.0 * ((knots.row(next) - knots.row(i)) / h[i] - (knots.row(i) - knots.row(prev)) / h[prev]);
  }
  const Matrix second = a.partialPivLu().solve(rhs);

  Matrix coef(4 * k, n);
  for (int i = 0; i < k; ++i) {
    const int next = (i + 1) % k;
    coef.row(4 * i) = knots.row(i);
    coef.row(4 * i + 1) =
        (knots.row(next) - knots.row(i)) / h[i] - h[i] * (2.0 * second.row(i) + second.row(next)) / 6.0;
    coef.row(4 * i + 2) = second.row(i) / 2.0;
    coef.row(4 * i + 3) = (second.row(next) - second.row(i)) / (6.0 * h[i]);
  }

  if (ordering.empty()) {
    ordering.resize(k);
    for (int i = 0; i < k; ++i) ordering[i] = i;
  }
  return from_parts(knots, std::move(ordering), std::move(breaks), std::move(coef));
}

ClosedSpline ClosedSpline::from_parts(Matrix knots, std::vector<int> ordering, std::vector<double> breaks,
                                      Matrix coefficients) {
  const auto k = knots.rows();
  if (k < 3 || static_cast<Eigen::Index>(breaks.size()) != k + 1 || coefficients.rows() != 4 * k ||
      coefficients.cols() != knots.cols() || static_cast<Eigen::Index>(ordering.size()) != k) {
    throw Error(ErrorKind::Parse, "inconsistent closed spline parts");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw Error(ErrorKind::Parse, "spline breaks must increase");
  }
  ClosedSpline s;
  s.knots_ = std::move(knots);
  s.ordering_ = std::move(ordering);
  s.breaks_ = std::move(breaks);
  s.coefficients_ = std::move(coefficients);
  return s;
}

Vector ClosedSpline::evaluate_segment(int k, double t, int order) const {
  const auto c0 = coefficients_.row(4 * k);
  const auto c1 = coefficients_.row(4 * k + 1);
  const auto c2 = coefficients_.row(4 * k + 2);
  const auto c3 = coefficients_.row(4 * k + 3);
  switch (order) {
    case 0: return (c0 + t * (c1 + t * (c2 + t * c3))).transpose();
    case 1: return (c1 + t * (2.0 * c2 + 3.0 * t * c3)).transpose();
    case 2: return (2.0 * c2 + 6.0 * t * c3).transpose();
    case 3: return (6.0 * c3).transpose();
    default: return Vector::Zero(coefficients_.cols());
  }
}

Vector ClosedSpline::evaluate(double s, int order) const {
  const double w = wrap_scalar(s, length());
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), w);
  int k = static_cast<int>(it - breaks_.begin()) - 1;
  k = std::clamp(k, 0, segments() - 1);
  return evaluate_segment(k, w - breaks_[k], order);
}

// ---------------------------------------------------------------------------
// Manifold

std::string Manifold::variant_name() const {
  return std::visit(Overloaded{[](const Ellipse2D&) { return std::string("ellipse"); },
                               [](const TorusR3&) { return std::string("torus"); },
                               [](const ClosedSpline&) { return std::string("closed_spline"); },
                               [](const ConstantPoint&) { return std::string("constant"); }},
                    v_);
}

int Manifold::ambient_dim() const {
  return std::visit(Overloaded{[](const Ellipse2D&) { return 2; }, [](const TorusR3&) { return 3; },
                               [](const ClosedSpline& s) { return s.ambient_dim(); },
                               [](const ConstantPoint& p) { return static_cast<int>(p.point.size()); }},
                    v_);
}

int Manifold::intrinsic_dim() const { return std::holds_alternative<TorusR3>(v_) ? 2 : 1; }

std::vector<double> Manifold::periods() const {
  return std::visit(Overloaded{[](const Ellipse2D&) { return std::vector<double>{kTwoPi}; },
                               [](const TorusR3&) { return std::vector<double>{kTwoPi, kTwoPi}; },
                               [](const ClosedSpline& s) { return std::vector<double>{s.length()}; },
                               [](const ConstantPoint&) { return std::vector<double>{1.0}; }},
                    v_);
}

void Manifold::check_state(const State& z) const {
  if (z.size() != intrinsic_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "manifold state has " + std::to_string(z.size()) +
                                                  " coordinates, expected " + std::to_string(intrinsic_dim()));
  }
}

State Manifold::wrap(const State& z) const {
  check_state(z);
  const auto p = periods();
  State w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = wrap_scalar(z[i], p[i]);
  return w;
}

Vector Manifold::evaluate(const State& z_in) const {
  const State z = wrap(z_in);
  return std::visit(
      Overloaded{[&](const Ellipse2D& e) {
                   Vector p(2);
                   p << e.a * std::cos(z[0]), e.b * std::sin(z[0]);
                   return p;
                 },
                 [&](const TorusR3& t) {
                   const double ring = t.major + t.minor * std::cos(z[1]);
                   Vector p(3);
                   p << ring * std::cos(z[0]), ring * std::sin(z[0]), t.minor * std::sin(z[1]);
                   return p;
                 },
                 [&](const ClosedSpline& s) { return s.evaluate(z[0]); },
                 [&](const ConstantPoint& c) { return c.point; }},
      v_);
}

Matrix Manifold::tangent(const State& z_in) const {
  const State z = wrap(z_in);
  Matrix t = std::visit(
      Overloaded{[&](const Ellipse2D& e) {
                   Matrix d(2, 1);
                   d << -e.a * std::sin(z[0]), e.b * std::cos(z[0]);
                   return d;
                 },
                 [&](const TorusR3& t) {
                   const double ring = t.major + t.minor * std::cos(z[1]);
                   Matrix d(3, 2);
                   d(0, 0) = -ring * std::sin(z[0]);
                   d(1, 0) = ring * std::cos(z[0]);
                   d(2, 0) = 0.0;
                   d(0, 1) = -t.minor * std::sin(z[1]) * std::cos(z[0]);
                   d(1, 1) = -t.minor * std::sin(z[1]) * std::sin(z[0]);
                   d(2, 1) = t.minor * std::cos(z[1]);
                   return d;
                 },
                 [&](const ClosedSpline& s) {
                   Matrix d = s.evaluate(z[0], 1);
                   return d;
                 },
                 [&](const ConstantPoint& c) {
                   Matrix d = Matrix::Zero(c.point.size(), 1);
                   return d;
                 }},
      v_);
  for (Eigen::Index c = 0; c < t.cols(); ++c) {
    if (!(t.col(c).norm() >= kDegenerateTangentNorm)) {
      throw Error(ErrorKind::DegenerateTangent, "tangent vanishes on the " + variant_name() + " manifold");
    }
  }
  return t;
}

}  // namespace pgpca
