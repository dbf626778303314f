#include "innervar/suites.hpp"

#include <cmath>
#include <numbers>

namespace innervar {

double SeededRng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int SeededRng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

Field random_torus_field(int dim, int comps, SeededRng& rng, double amp, double offset) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<std::vector<fields::TrigTerm>> c(comps);
  for (int a = 0; a < comps; ++a) {
    c[a].push_back({offset, {}, 0.5 * std::numbers::pi});
    for (int t = 0; t < 3; ++t) {
      fields::TrigTerm term;
      term.coef = amp * rng.uniform(-1.0, 1.0);
      term.phase = 3.0 * rng.uniform(-1.0, 1.0);
      for (int i = 0; i < dim; ++i) term.k[i] = kTwoPi * rng.integer(-1, 1);
      c[a].push_back(term);
    }
  }
  return fields::trigonometric(dim, c);
}

BulkRule torus_rule(int dim, int n) {
  std::vector<Rule1D> axes(dim, periodic_trapezoid(n, 0.0, 1.0));
  return tensor_rule(axes);
}

RandomVariationCase random_variation_case(int index, SeededRng& rng) {
  RandomVariationCase c;
  c.dim = (index / 5) % 2 == 0 ? 2 : 3;
  int m = 1;
  switch (index % 5) {
    case 0: {
      integrands::QuasiLinearParams q;
      q.a0 = 1.5;
      q.a1 = 0.5 * rng.uniform(-1, 1);
      q.b = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      q.c1 = rng.uniform(-1, 1);
      q.c2 = rng.uniform(-1, 1);
      q.v2 = rng.uniform(-1, 1);
      q.v4 = 0.5 * rng.uniform(0, 1);
      q.kappa = 0.5 * rng.uniform(0, 1);
      q.r = 1.0 + rng.uniform(0, 1);
      c.family = "quasi-linear";
      c.integrand = integrands::quasi_linear(q);
      break;
    }
    case 1:
    case 2:
    case 3: {
      const double p = 2.0 * (index % 5);
      c.family = "p-allen-cahn";
      c.integrand = integrands::p_allen_cahn(0.5, p);
      break;
    }
    default:
      c.family = "ginzburg-landau";
      c.integrand = integrands::ginzburg_landau(0.5);
      m = 2;
  }
  c.u = random_torus_field(c.dim, m, rng, 0.6, 0.2);
  c.eta = random_torus_field(c.dim, c.dim, rng, 0.15);
  c.zeta = random_torus_field(c.dim, c.dim, rng, 0.15);
  c.rule = torus_rule(c.dim, c.dim == 2 ? 64 : 32);
  return c;
}

Field random_compact_field(int dim, const Point& center, double reach, SeededRng& rng) {
  Point c(dim);
  double r2 = 0;
  do {
    r2 = 0;
    for (int i = 0; i < dim; ++i) {
      c[i] = rng.uniform(-1, 1);
      r2 += c[i] * c[i];
    }
  } while (r2 > 1.0);
  c *= 0.3 * reach;
  const double radius = c.norm() + reach * rng.uniform(1.3, 2.0);
  SmallMat a(dim, dim);
  Point b(dim);
  for (int i = 0; i < dim; ++i) {
    b[i] = rng.uniform(-1, 1);
    for (int j = 0; j < dim; ++j) a(i, j) = rng.uniform(-1, 1);
  }
  return fields::product(fields::radial_bump(dim, Point(center + c), radius), fields::linear(a, b));
}

}  // namespace innervar
