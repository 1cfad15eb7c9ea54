#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgpca/coords.hpp"
#include "pgpca/landmarks.hpp"
#include "pgpca/manifold.hpp"

namespace pgpca {

/// Latent law p(z) of a simulated model.
enum class LatentLaw {
  UniformParameter,  // uniform over the curve parameter domain ([0, 2pi) or [0, L))
  UniAng,            // torus: independent uniform angles
  UniTorus,          // torus: uniform over surface area
};

enum class CoordKind { Euclidean, Geometric };

const char* to_string(LatentLaw law);
const char* to_string(CoordKind kind);

/// A fully specified true PGPCA model plus the experiment protocol used with it.
struct TrueModelSpec {
  std::string name;
  Manifold manifold;
  CoordKind coords = CoordKind::Euclidean;
  LatentLaw law = LatentLaw::UniformParameter;
  Vector lambda;  // diagonal of the frame-local covariance (C C' + sigma2 I)
  int train_samples = 5000;
  int landmarks = 500;
  int em_iters = 20;
  int trials = 20;
  int trial_len = 2000;

  CoordinateField field() const;
  /// Throws IllegalPair for a law that does not fit the manifold and
  /// InvalidArgument for negative or mis-sized lambda. Zero lambda entries
  /// are allowed (noise-free sampling).
  void validate() const;
};

struct SampleResult {
  DataMatrix data;  // T x n
  Matrix latents;   // T x l
};

/// y_t = phi(z_t) + K(z_t) v_t with z_t ~ p(z) and v_t ~ N(0, diag(lambda)).
/// Bit-identical for a fixed seed.
SampleResult sample(const TrueModelSpec& spec, int count, std::uint64_t seed);
inline SampleResult sample(const TrueModelSpec& spec, std::uint64_t seed) {
  return sample(spec, spec.train_samples, seed);
}

/// The eight simulation cases: loop2d-{gecov,eucov}, loop10d-{gecov,eucov},
/// torus-{uniang,unitorus}-{gecov,eucov}.
const std::vector<TrueModelSpec>& standard_specs();
const TrueModelSpec& standard_spec(const std::string& name);

/// The closed 6-knot spline in R^10 used by the loop10d cases, generated from
/// a fixed seed (random smooth closed curve, knots at six equally spaced angles).
Manifold canonical_loop10d();
inline constexpr std::uint64_t kCanonicalLoopSeed = 20240917;

/// True latent density p(z) evaluated at the landmarks and normalized to sum to 1.
Vector latent_weights(const TrueModelSpec& spec, const LandmarkSet& landmarks);

/// Independent, reproducible stream seeds derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pgpca
