#include "pgpca/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pgpca/error.hpp"

namespace pgpca {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector diag_of(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

TrueModelSpec make_spec(std::string name, Manifold manifold, CoordKind coords, LatentLaw law, Vector lambda,
                        int train, int landmarks, int iters) {
  TrueModelSpec s{std::move(name), std::move(manifold), coords, law, std::move(lambda), train, landmarks, iters};
  return s;
}

std::vector<TrueModelSpec> build_specs() {
  std::vector<TrueModelSpec> specs;
  const Vector loop2d = diag_of({0.1, 0.3});
  const Vector loop10d = diag_of({20, 2, 18, 4, 16, 6, 14, 8, 12, 10});
  const Vector torus = diag_of({0.1, 0.3, 0.5});
  const Manifold spline = canonical_loop10d();
  for (CoordKind k : {CoordKind::Geometric, CoordKind::Euclidean}) {
    const std::string suffix = k == CoordKind::Geometric ? "gecov" : "eucov";
    specs.push_back(make_spec("loop2d-" + suffix, Manifold::ellipse(), k, LatentLaw::UniformParameter, loop2d,
                              5000, 500, 20));
  }
  for (CoordKind k : {CoordKind::Geometric, CoordKind::Euclidean}) {
    const std::string suffix = k == CoordKind::Geometric ? "gecov" : "eucov";
    specs.push_back(
        make_spec("loop10d-" + suffix, spline, k, LatentLaw::UniformParameter, loop10d, 5000, 500, 40));
  }
  for (LatentLaw law : {LatentLaw::UniAng, LatentLaw::UniTorus}) {
    for (CoordKind k : {CoordKind::Geometric, CoordKind::Euclidean}) {
      const std::string name = std::string("torus-") + (law == LatentLaw::UniAng ? "uniang" : "unitorus") + "-" +
                               (k == CoordKind::Geometric ? "gecov" : "eucov");
      specs.push_back(make_spec(name, Manifold::torus(), k, law, torus, 50000, 1000, 40));
    }
  }
  return specs;
}

State draw_state(const TrueModelSpec& spec, const std::vector<double>& periods, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (spec.law == LatentLaw::UniformParameter) {
    State z(1);
    z[0] = periods[0] * unit(rng);
    return z;
  }
  State z(2);
  z[0] = kTwoPi * unit(rng);
  if (spec.law == LatentLaw::UniAng) {
    z[1] = kTwoPi * unit(rng);
    return z;
  }
  // Area element of the torus is proportional to R + r cos z2.
  const auto& torus = std::get<TorusR3>(spec.manifold.variant());
  for (;;) {
    const double cand = kTwoPi * unit(rng);
    const double accept = (torus.major + torus.minor * std::cos(cand)) / (torus.major + torus.minor);
    if (unit(rng) < accept) {
      z[1] = cand;
      return z;
    }
  }
}

}  // namespace

const char* to_string(LatentLaw law) {
  switch (law) {
    case LatentLaw::UniformParameter: return "uniform";
    case LatentLaw::UniAng: return "uniang";
    case LatentLaw::UniTorus: return "unitorus";
  }
  return "unknown";
}

const char* to_string(CoordKind kind) { return kind == CoordKind::Geometric ? "gecov" : "eucov"; }

CoordinateField TrueModelSpec::field() const {
  return coords == CoordKind::Geometric ? CoordinateField::geometric(manifold) : CoordinateField::euclidean();
}

void TrueModelSpec::validate() const {
  const bool torus = std::holds_alternative<TorusR3>(manifold.variant());
  const bool torus_law = law == LatentLaw::UniAng || law == LatentLaw::UniTorus;
  if (torus != torus_law) {
    throw Error(ErrorKind::IllegalPair, std::string("latent law '") + to_string(law) + "' does not apply to the " +
                                            manifold.variant_name() + " manifold");
  }
  if (lambda.size() != manifold.ambient_dim()) {
    throw Error(ErrorKind::InvalidArgument, "lambda must have one entry per ambient dimension");
  }
  if (!lambda.allFinite() || (lambda.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidArgument, "lambda entries must be finite and nonnegative");
  }
  if (train_samples < 1 || landmarks < 1 || em_iters < 1 || trials < 1 || trial_len < 1) {
    throw Error(ErrorKind::InvalidArgument, "spec counts must be positive");
  }
}

SampleResult sample(const TrueModelSpec& spec, int count, std::uint64_t seed) {
  spec.validate();
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const int n = spec.manifold.ambient_dim();
  const CoordinateField field = spec.field();
  const auto periods = spec.manifold.periods();
  const Vector scale = spec.lambda.cwiseSqrt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SampleResult out{DataMatrix(count, n), Matrix(count, spec.manifold.intrinsic_dim())};
  Vector v(n);
  for (int t = 0; t < count; ++t) {
    const State z = draw_state(spec, periods, rng);
    for (int c = 0; c < n; ++c) v[c] = scale[c] * normal(rng);
    out.data.row(t) = (spec.manifold.evaluate(z) + field.frame(spec.manifold, z) * v).transpose();
    out.latents.row(t) = z.transpose();
  }
  return out;
}

Manifold canonical_loop10d() {
  constexpr int kDim = 10;
  constexpr int kKnots = 6;
  std::mt19937_64 rng(kCanonicalLoopSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // c(theta) = a1 cos(theta) + b1 sin(theta) + a2 cos(2 theta) + b2 sin(2 theta)
  Matrix coef(4, kDim);
  const double amplitude[4] = {15.0, 15.0, 5.0, 5.0};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < kDim; ++c) coef(r, c) = amplitude[r] * normal(rng);
  Matrix knots(kKnots, kDim);
  for (int k = 0; k < kKnots; ++k) {
    const double th = kTwoPi * k / kKnots;
    knots.row(k) = std::cos(th) * coef.row(0) + std::sin(th) * coef.row(1) + std::cos(2 * th) * coef.row(2) +
                   std::sin(2 * th) * coef.row(3);
  }
  return Manifold(ClosedSpline::through_knots(knots));
}

const std::vector<TrueModelSpec>& standard_specs() {
  static const std::vector<TrueModelSpec> specs = build_specs();
  return specs;
}

const TrueModelSpec& standard_spec(const std::string& name) {
  for (const auto& s : standard_specs()) {
    if (s.name == name) return s;
  }
  std::string known;
  for (const auto& s : standard_specs()) known += (known.empty() ? "" : ", ") + s.name;
  throw Error(ErrorKind::InvalidArgument, "unknown spec '" + name + "' (known: " + known + ")");
}

Vector latent_weights(const TrueModelSpec& spec, const LandmarkSet& landmarks) {
  Vector w(static_cast<Eigen::Index>(landmarks.size()));
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    double density = 1.0;
    if (spec.law == LatentLaw::UniTorus) {
      const auto& torus = std::get<TorusR3>(spec.manifold.variant());
      density = torus.major + torus.minor * std::cos(landmarks.points[j][1]);
    }
    w[static_cast<Eigen::Index>(j)] = density;
  }
  return w / w.sum();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace pgpca
