#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "innervar/field.hpp"
#include "innervar/quadrature.hpp"
#include "innervar/variation.hpp"

namespace innervar {

/// mt19937_64 with explicit conversions, so draws are identical across
/// standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

/// Trigonometric field on the unit torus: a constant `offset` plus three
/// modes with wave numbers in 2 pi {-1, 0, 1}^dim and amplitudes up to `amp`.
Field random_torus_field(int dim, int comps, SeededRng& rng, double amp, double offset = 0.0);
/// Periodic trapezoid rule with n points per axis on [0, 1]^dim.
BulkRule torus_rule(int dim, int n);

struct RandomVariationCase {
  std::string family;
  int dim = 2;
  Integrand integrand;
  Field u, eta, zeta;
  BulkRule rule;
};

/// Case `index` cycles through quasi-linear, p-Allen-Cahn (p = 2, 4, 6) and
/// Ginzburg-Landau integrands, in two and three dimensions.
RandomVariationCase random_variation_case(int index, SeededRng& rng);

/// Random affine vector field times a bump whose support contains the ball
/// (center, reach): offset up to 0.3 reach, radius |offset| + [1.3, 2] reach.
Field random_compact_field(int dim, const Point& center, double reach, SeededRng& rng);

}  // namespace innervar
