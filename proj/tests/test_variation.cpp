#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "innervar/calculus.hpp"
#include "innervar/errors.hpp"
#include "innervar/geometry.hpp"
#include "innervar/profiles.hpp"
#include "innervar/variation.hpp"

using namespace innervar;
using namespace innervar::fields;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// periodic trigonometric field on the unit torus with integer wave numbers
Field torus_field(int dim, int comps, std::mt19937_64& rng, double amp, double offset = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-1, 1);
  std::vector<std::vector<TrigTerm>> c(comps);
  for (int a = 0; a < comps; ++a) {
    c[a].push_back({offset, {}, 0.5 * std::numbers::pi});  // constant via sin(pi/2)
    for (int t = 0; t < 3; ++t) {
      TrigTerm term{amp * u(rng), {}, 3.0 * u(rng)};
      for (int i = 0; i < dim; ++i) term.k[i] = kTwoPi * k(rng);
      c[a].push_back(term);
    }
  }
  return trigonometric(dim, c);
}

BulkRule torus_rule(int dim, int n) {
  std::vector<Rule1D> axes(dim, periodic_trapezoid(n, 0.0, 1.0));
  return tensor_rule(axes);
}

BulkRule box_rule(int dim, double lo, double hi, int panels, int order) {
  std::vector<double> br;
  for (int i = 0; i <= panels; ++i) br.push_back(lo + (hi - lo) * i / panels);
  std::vector<Rule1D> axes(dim, composite_gauss(br, order));
  return tensor_rule(axes);
}

// bump-multiplied linear field, compactly supported in the disk of radius 0.8
Field bumped_linear(int dim, const SmallMat& a, const Point& b) {
  return product(radial_bump(dim, Point::Zero(dim), 0.8), linear(a, b));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("integrand partials agree with differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  integrands::QuasiLinearParams q;
  q.a0 = 1.3;
  q.a1 = 0.4;
  q.b = {0.3, -0.2, 0.1};
  q.c1 = 0.5;
  q.c2 = -0.3;
  q.v2 = 0.7;
  q.v4 = 0.2;
  q.kappa = 0.3;
  q.r = 1.5;
  const std::vector<Integrand> all = {integrands::dirichlet(1), integrands::dirichlet(2),
                                      integrands::p_allen_cahn(0.3, 1.5), integrands::p_allen_cahn(0.3, 2.0),
                                      integrands::p_allen_cahn(0.2, 3.0), integrands::ginzburg_landau(0.3),
                                      integrands::quasi_linear(q)};
  for (const auto& f : all) {
    CAPTURE(f->label());
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const int m = f->state_dim(), n = 3;
      StateVec z(m);
      StateGrad p(m, n);
      for (int a = 0; a < m; ++a) z[a] = u(rng);
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) p(a, i) = u(rng);
      worst = std::max(worst, integrand_partials_error(*f, z, p));
      const auto v = f->eval(z, p, 2);
      CHECK((v.fpp - v.fpp.transpose()).norm() <= 1e-12 * (1 + v.fpp.norm()));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("integrand special values") {
  const auto ac = integrands::p_allen_cahn(0.1, 2.0);
  StateVec z(1);
  z << 0.3;
  StateGrad p(1, 2);
  p << 0.5, -1.0;
  const auto v = ac->eval(z, p, 2);
  CHECK((v.fpp - 0.1 * FlatMat::Identity(2, 2)).norm() < 1e-15);
  CHECK(v.fpp_tensor.norm() == 0.0);
  CHECK(v.fzz(0, 0) == doctest::Approx(2.0 * (3 * 0.09 - 1) / 0.1));

  const auto gl = integrands::ginzburg_landau(0.05);
  StateVec w(2);
  w << 0.6, -0.8;
  const auto g = gl->eval(w, StateGrad::Zero(2, 3), 2);
  CHECK(std::abs(g.f) < 1e-15);
  CHECK(g.fz.norm() < 1e-14);
}

TEST_CASE("energy values") {
  const BulkRule box = box_rule(2, 0.0, 1.0, 1, 4);
  CHECK(energy(*integrands::dirichlet(), coordinate(2, 0), box) == doctest::Approx(0.5).epsilon(1e-14));
  const Field one = constant(3, make_point({1.0, 0.0}));
  CHECK(std::abs(energy(*integrands::ginzburg_landau(0.1), one, box_rule(3, 0, 1, 1, 2))) < 1e-15);
  CHECK_THROWS_AS(energy(*integrands::ginzburg_landau(0.1), coordinate(3, 0), box_rule(3, 0, 1, 1, 2)), Error);

  // tanh profile across x1 = 0 in [-1, 1]^2 carries 4/3 per unit length
  const auto prof = std::make_shared<const ProfileTable>(2.0);
  FlatPatchSpec spec{2, 0, 0.0, make_point({0, -1}), make_point({0, 1}), false, 4, 4};
  const auto g = make_flat_patch(spec);
  const double eps = 0.02;
  const Field u = ansatz_field(g, eps, prof, {LevelKind::SignedDistance, 0.8});
  std::vector<double> br{-0.8, -0.4};
  for (double s = -16.0; s <= 16.0; s += 1.0) br.push_back(s * eps);
  br.push_back(0.4);
  br.push_back(0.8);
  const BulkRule tube = tube_rule(*g, composite_gauss(br, 12));
  CHECK(energy(*integrands::p_allen_cahn(eps, 2.0), u, tube) == doctest::Approx(8.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("first and second variations") {
  const BulkRule box = box_rule(2, -1.0, 1.0, 32, 10);
  const Field harmonic = polynomial(2, {{{1.0, {1, 1}}}});
  const Field phi = radial_bump(2, make_point({0.1, -0.2}), 0.6);
  const auto dir = integrands::dirichlet();
  CHECK(std::abs(first_variation(*dir, harmonic, phi, box)) <= 1e-8);
  CHECK(first_variation(*dir, harmonic, zero(2, 1), box) == 0.0);
  const double grad_sq = integrate(box, [&](const Point& x) { return phi.gradient(x).squaredNorm(); });
  CHECK(second_variation(*dir, harmonic, phi, box) == doctest::Approx(grad_sq).epsilon(1e-13));

  // Allen-Cahn form for p = 2 against the written-out integrand
  const double eps = 0.1;
  const auto ac = integrands::p_allen_cahn(eps, 2.0);
  const Field u = trigonometric(2, {{{0.8, {2.0, 1.0}, 0.3}}});
  const double q_form = integrate(box, [&](const Point& x) {
    const double uu = u.value(x), p = phi.value(x);
    return eps * phi.gradient(x).squaredNorm() + 2.0 / eps * (3 * uu * uu - 1) * p * p;
  });
  CHECK(second_variation(*ac, u, phi, box) == doctest::Approx(q_form).epsilon(1e-12));

  // differences of t -> A(u + t phi)
  const auto ac3 = integrands::p_allen_cahn(0.2, 3.0);
  auto a = [&](double t) { return energy(*ac3, sum(u, scaled(phi, t)), box); };
  const double h = 1e-3;
  const double d1 = (-a(2 * h) + 8 * a(h) - 8 * a(-h) + a(-2 * h)) / (12 * h);
  const double d2 = (-a(2 * h) + 16 * a(h) - 30 * a(0) + 16 * a(-h) - a(-2 * h)) / (12 * h * h);
  CHECK(first_variation(*ac3, u, phi, box) == doctest::Approx(d1).epsilon(1e-6));
  CHECK(second_variation(*ac3, u, phi, box) == doctest::Approx(d2).epsilon(1e-6));
}

TEST_CASE("inner variations: closed forms and the deformation oracle") {
  const BulkRule box = box_rule(2, -1.0, 1.0, 4, 8);
  const auto dir = integrands::dirichlet();
  const Field u = polynomial(2, {{{1.0, {1, 1}}, {0.3, {2, 0}}}});

  // a dilation leaves the planar Dirichlet energy unchanged
  for (double t : {-0.1, 0.05, 0.2})
    CHECK(deformed_energy(*dir, u, dilation(2, 0.7), zero(2, 2), box, t) ==
          doctest::Approx(energy(*dir, u, box)).epsilon(1e-14));
  // and scales the spatial one linearly
  const BulkRule cube = box_rule(3, -1.0, 1.0, 2, 4);
  const Field u3 = polynomial(3, {{{1.0, {1, 1, 0}}, {0.5, {0, 0, 2}}}});
  const double e3 = energy(*dir, u3, cube);
  CHECK(deformed_energy(*dir, u3, dilation(3, 0.5), zero(3, 3), cube, 0.2) == doctest::Approx(1.1 * e3).epsilon(1e-14));
  CHECK(first_inner_variation(*dir, u3, dilation(3, 0.5), cube) == doctest::Approx(0.5 * e3).epsilon(1e-13));
  CHECK(std::abs(second_inner_variation(*dir, u3, dilation(3, 0.5), zero(3, 3), cube)) < 1e-12);

  const auto o0 = inner_variation_oracle(*dir, u, zero(2, 2), zero(2, 2), box);
  CHECK(o0.first == 0.0);
  CHECK(o0.second == 0.0);
  CHECK(std::abs(first_inner_variation(*dir, constant(2, make_point({2.0})), dilation(2, 1.0), box)) == 0.0);

  // with eta = 0 the deformation is x + t^2/2 zeta, so the second inner
  // variation is the first one along zeta: F div zeta - (F_P, grad u grad zeta)
  const Field zeta = trigonometric(2, {{{0.5, {1.0, 2.0}, 0.1}}, {{-0.4, {0.5, -1.0}, 0.7}}});
  const auto t0 = second_inner_variation_terms(*dir, u, zero(2, 2), zeta, box);
  const double fdivz = integrate(box, [&](const Point& x) { return 0.5 * u.gradient(x).squaredNorm() * divergence(zeta, x); });
  CHECK(t0.fx == doctest::Approx(fdivz).epsilon(1e-13));
  CHECK(t0.div_coupling == 0.0);
  CHECK(t0.hessian == 0.0);
  CHECK(t0.total() == doctest::Approx(first_inner_variation(*dir, u, zeta, box)).epsilon(1e-13));

  // polynomial fields against the oracle
  SmallMat a(2, 2), b(2, 2);
  a << 0.3, -0.5, 0.2, 0.4;
  b << -0.1, 0.6, 0.3, -0.2;
  const Field eta = sum(linear(a, make_point({0.1, 0.2})), polynomial(2, {{{0.2, {2, 0}}}, {{-0.3, {1, 1}}}}));
  const Field zl = linear(b, make_point({0.0, -0.3}));
  const auto o = inner_variation_oracle(*dir, u, eta, zl, box);
  CHECK(rel(first_inner_variation(*dir, u, eta, box), o.first) <= 1e-8);
  CHECK(std::abs(second_inner_variation(*dir, u, eta, zl, box) - o.second) <= std::max(1e-6, 1e-4 * std::abs(o.second)));
}

TEST_CASE("bridge identities with compactly supported deformations") {
  const BulkRule box = box_rule(2, -0.8, 0.8, 40, 12);
  SmallMat a(2, 2), b(2, 2);
  a << 0.3, -0.5, 0.2, 0.4;
  b << -0.1, 0.6, 0.3, -0.2;
  const Field eta = bumped_linear(2, a, make_point({0.1, 0.2}));
  const Field zeta = bumped_linear(2, b, make_point({0.0, -0.3}));
  const auto dir = integrands::dirichlet();
  const Field quad = polynomial(2, {{{1.0, {2, 0}}, {-0.4, {1, 1}}, {0.7, {0, 2}}, {0.2, {0, 1}}}});
  CHECK(std::abs(sv_relation_residual(*dir, quad, eta, zeta, box)) <= 1e-8);
  CHECK(std::abs(first_inner_variation(*dir, quad, eta, box) -
                 first_variation(*dir, quad, minus_grad_dot(quad, eta), box)) <= 1e-8);

  // harmonic u: dA(u, X0) itself vanishes
  const Field harmonic = polynomial(2, {{{1.0, {2, 0}}, {-1.0, {0, 2}}, {0.5, {1, 1}}}});
  CHECK(std::abs(first_variation(*dir, harmonic, x0_field(harmonic, eta, zeta), box)) <= 1e-8);
  CHECK(std::abs(sv_relation_residual(*dir, harmonic, eta, zeta, box)) <= 1e-8);

  // eta = 0: F div zeta against dA(u, -grad u . zeta)
  CHECK(std::abs(sv_relation_residual(*dir, quad, zero(2, 2), zeta, box)) <= 1e-8);
}

TEST_CASE("random periodic cases satisfy every identity of the engine") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int c = 0; c < 6; ++c) {
    CAPTURE(c);
    const int dim = c % 2 == 0 ? 2 : 3;
    Integrand f;
    int m = 1;
    if (c < 2) {
      integrands::QuasiLinearParams q;
      q.a0 = 1.5;
      q.a1 = 0.5 * un(rng);
      q.b = {un(rng), un(rng), un(rng)};
      q.c1 = un(rng);
      q.c2 = un(rng);
      q.v2 = un(rng);
      q.v4 = 0.5 * std::abs(un(rng));
      q.kappa = 0.5 * std::abs(un(rng));
      q.r = 1.0 + std::abs(un(rng));
      f = integrands::quasi_linear(q);
    } else if (c < 4) {
      f = integrands::p_allen_cahn(0.5, c == 2 ? 2.0 : 4.0);
    } else {
      f = integrands::ginzburg_landau(0.5);
      m = 2;
    }
    const Field u = torus_field(dim, m, rng, 0.6, 0.2);
    const Field eta = torus_field(dim, dim, rng, 0.15);
    const Field zeta = torus_field(dim, dim, rng, 0.15);
    const BulkRule rule = torus_rule(dim, dim == 2 ? 48 : 32);
    const auto r = variation_report(*f, u, eta, zeta, rule);
    CHECK(std::abs(r.fv_residual) <= 1e-8);
    CHECK(std::abs(r.sv_residual) <= 1e-6 * (1 + std::abs(r.second_inner)));
    CHECK(r.oracle_first_gap <= std::max(1e-6, 1e-4 * std::abs(r.first_inner)));
    CHECK(r.oracle_second_gap <= std::max(1e-6, 1e-4 * std::abs(r.second_inner)));
    CHECK(r.to_json().contains("terms"));
  }
}

TEST_CASE("four-tensor term of the p-Laplacian") {
  const auto prof = std::make_shared<const ProfileTable>(3.0);
  const auto circle = make_circle(make_point({0, 0}), 1.0, 64);
  const double eps = 0.05;
  const Field u = ansatz_field(circle, eps, prof, {LevelKind::SignedDistance, 0.4});
  std::vector<double> br{-0.4, -0.2};
  for (double s = -prof->s_star(); s < prof->s_star(); s += 0.25) br.push_back(s * eps);
  br.push_back(prof->s_star() * eps);
  br.push_back(0.2);
  br.push_back(0.4);
  const BulkRule tube = tube_rule(*circle, composite_gauss(br, 10));
  const Field eta = product(radial_bump(2, make_point({0.9, 0.3}), 0.5), linear(SmallMat::Identity(2, 2), make_point({0.2, -0.1})));
  const Field zeta = radial_bump(2, make_point({-0.8, 0.2}), 0.5);
  const Field zeta2 = stack({zeta, scaled(zeta, 0.5)});
  const auto f = integrands::p_allen_cahn(eps, 3.0);
  const auto t = second_inner_variation_terms(*f, u, eta, zeta2, tube);
  const double direct = integrate(tube, [&](const Point& x) {
    const Point g = u.gradient(x);
    const double n = g.norm();
    const Point gj = eta.jacobian(x).transpose() * g;  // grad u . grad eta
    // (p - 2) eps^(p-1) |grad u|^(p-4) (grad u . (grad u . grad eta))^2 with p = 3
    return n < 1e-9 ? 0.0 : eps * eps * g.dot(gj) * g.dot(gj) / n;
  });
  CHECK(std::abs(t.tensor) > 1e-3);
  CHECK(t.tensor == doctest::Approx(direct).epsilon(1e-10));
  const auto o = inner_variation_oracle(*f, u, eta, zeta2, tube);
  CHECK(std::abs(t.total() - o.second) <= std::max(1e-6, 1e-4 * std::abs(o.second)));
}
