#include <doctest.h>

#include <cmath>
#include <random>

#include "innervar/calculus.hpp"

using namespace innervar;
using namespace innervar::fields;

namespace {

Field random_cubic_field(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<Monomial>> comps(dim);
  for (int c = 0; c < dim; ++c)
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b)
        for (int e = 0; a + b + e <= 3 && (dim == 3 || e == 0); ++e) comps[c].push_back({u(rng), {a, b, e}});
  return polynomial(dim, comps);
}

Field random_trig_field(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<TrigTerm>> comps(dim);
  for (int c = 0; c < dim; ++c)
    for (int t = 0; t < 3; ++t) {
      TrigTerm term{0.5 * u(rng), {}, u(rng) * 3.0};
      for (int i = 0; i < dim; ++i) term.k[i] = 2.0 * u(rng);
      comps[c].push_back(term);
    }
  return trigonometric(dim, comps);
}

Point random_point(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = u(rng);
  return p;
}

// plain central-difference jacobian of the values
SmallMat fd_jacobian(const Field& f, const Point& x, double h) {
  SmallMat j(f.components(), f.dim());
  for (int i = 0; i < f.dim(); ++i) {
    Point a = x, b = x;
    a[i] += h;
    b[i] -= h;
    j.col(i) = (f.values(a) - f.values(b)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("divergence of dilations, rotations and random cubics") {
  CHECK(divergence(dilation(2, 0.7), make_point({0.3, -2.0})) == doctest::Approx(1.4));
  CHECK(divergence(rotation2d(1.0), make_point({0.3, -2.0})) == doctest::Approx(0.0));
  std::mt19937_64 rng(7);
  for (int dim : {2, 3}) {
    const Field v = random_cubic_field(dim, rng);
    for (int k = 0; k < 10; ++k) {
      const Point x = random_point(dim, rng);
      CHECK(divergence(v, x) == doctest::Approx(fd_jacobian(v, x, 1e-5).trace()).epsilon(1e-8));
    }
  }
}

TEST_CASE("analytic jacobians and hessians agree with differences and are symmetric") {
  std::mt19937_64 rng(11);
  const Field v = random_trig_field(3, rng);
  for (int k = 0; k < 10; ++k) {
    const Point x = random_point(3, rng);
    const SmallMat j = v.jacobian(x);
    CHECK((j - fd_jacobian(v, x, 1e-5)).norm() < 1e-8);
    const auto d2 = v.second_derivatives(x);
    for (int c = 0; c < 3; ++c) CHECK((d2[c] - d2[c].transpose()).norm() < 1e-10);
  }
}

TEST_CASE("zeta_eta closed forms and jacobian consistency") {
  const Point x = make_point({0.3, -0.4, 1.2});
  const Field z = zeta_eta(dilation(3, 0.5));
  CHECK((z.values(x) - 0.25 * (1.0 - 3.0) * x).norm() < 1e-14);

  const Point w = make_point({0.2, -0.5, 0.9});
  const Field zr = zeta_eta(rotation3d(w));
  const Eigen::Vector3d wv(w[0], w[1], w[2]), xv(x[0], x[1], x[2]);
  const Eigen::Vector3d expected = wv.cross(wv.cross(xv));
  for (int i = 0; i < 3; ++i) CHECK(zr.values(x)[i] == doctest::Approx(expected[i]).epsilon(1e-14));

  std::mt19937_64 rng(3);
  const Field eta = random_cubic_field(3, rng);
  const Field ze = zeta_eta(eta);
  for (int k = 0; k < 5; ++k) {
    const Point y = random_point(3, rng);
    // by hand: -(div eta) eta + (grad eta) eta
    const SmallMat j = eta.jacobian(y);
    const Point e = eta.values(y);
    const Point manual = -j.trace() * e + j * e;
    CHECK((ze.values(y) - manual).norm() < 1e-12);
    CHECK((ze.jacobian(y) - fd_jacobian(ze, y, 1e-5)).norm() < 1e-7 * (1 + ze.jacobian(y).norm()));
  }
}

TEST_CASE("zeta_eta of a rotation follows the rotation group to third order") {
  const Point w = make_point({0.0, 0.0, 1.0});
  const Field eta = rotation3d(w);
  const DeformationMap small(eta, zeta_eta(eta), 1e-2), smaller(eta, zeta_eta(eta), 5e-3);
  const Point x = make_point({1.0, 0.5, -0.2});
  auto exact = [&](double t) {
    return make_point({std::cos(t) * x[0] - std::sin(t) * x[1], std::sin(t) * x[0] + std::cos(t) * x[1], x[2]});
  };
  const double e1 = (small.deform(x) - exact(1e-2)).norm();
  const double e2 = (smaller.deform(x) - exact(5e-3)).norm();
  CHECK(e1 / e2 == doctest::Approx(8.0).epsilon(0.01));
}

TEST_CASE("x0 field closed forms and the t^2 coefficient of the pulled-back function") {
  const Point x = make_point({0.3, 0.8});
  const Field u = coordinate(2, 0);
  CHECK(x0_field(u, constant(2, make_point({1.0, 0.0})), zero(2, 2)).value(x) == doctest::Approx(0.0));
  CHECK(x0_field(u, zero(2, 2), constant(2, make_point({1.0, 0.0}))).value(x) == doctest::Approx(-1.0));

  // u quadratic, eta linear, zeta linear: compare with 5-point second
  // difference in t of u(Phi_t^{-1}(y)).
  const Field uq = polynomial(2, {{{1.0, {2, 0}}, {-0.5, {1, 1}}, {0.7, {0, 2}}, {0.2, {1, 0}}}});
  SmallMat a(2, 2), b(2, 2);
  a << 0.3, -0.2, 0.5, 0.1;
  b << -0.4, 0.6, 0.2, 0.3;
  const Field eta = linear(a, make_point({0.1, -0.2}));
  const Field zeta = linear(b, make_point({0.05, 0.3}));
  const Field x0 = x0_field(uq, eta, zeta);
  const double h = 1e-3;
  auto g = [&](double t) { return uq.value(DeformationMap(eta, zeta, t).invert(x)); };
  const double d2 = (-g(2 * h) + 16 * g(h) - 30 * g(0) + 16 * g(-h) - g(-2 * h)) / (12 * h * h);
  CHECK(x0.value(x) == doctest::Approx(d2).epsilon(1e-6));
}

TEST_CASE("determinant expansion") {
  const Point x = make_point({0.4, -0.1});
  auto c = det_expansion(dilation(2, 0.3), zero(2, 2), x);
  CHECK(c.c1 == doctest::Approx(0.6));
  CHECK(c.c2 == doctest::Approx(2 * 0.09));
  c = det_expansion(rotation2d(1.0), zero(2, 2), x);
  CHECK(c.c1 == doctest::Approx(0.0));
  CHECK(c.c2 == doctest::Approx(2.0));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const Field eta = random_trig_field(3, rng), zeta = random_trig_field(3, rng);
    const Point y = random_point(3, rng);
    const double h = 1e-3;
    auto det = [&](double t) { return DeformationMap(eta, zeta, t).jacobian(y).determinant(); };
    const double d1 = (-det(2 * h) + 8 * det(h) - 8 * det(-h) + det(-2 * h)) / (12 * h);
    const double d2 = (-det(2 * h) + 16 * det(h) - 30 * det(0) + 16 * det(-h) - det(-2 * h)) / (12 * h * h);
    const auto e = det_expansion(eta, zeta, y);
    CHECK(e.c1 == doctest::Approx(d1).epsilon(1e-6));
    CHECK(e.c2 == doctest::Approx(d2).epsilon(1e-6));
  }
}

TEST_CASE("divergence identity for (div eta)^2 - tr(grad eta ^2)") {
  SmallMat a(3, 3);
  a << 1, 2, 0, -1, 0.5, 3, 0.2, 0.1, -2;
  CHECK(std::abs(good_identity_residual(linear(a, Point::Zero(3)), make_point({1, 2, 3}))) < 1e-12);
  std::mt19937_64 rng(9);
  const Field poly = random_cubic_field(3, rng);
  const Field trig = random_trig_field(3, rng);
  double worst_poly = 0, worst_fd = 0;
  for (int k = 0; k < 20; ++k) {
    const Point x = random_point(3, rng);
    worst_poly = std::max(worst_poly, std::abs(good_identity_residual(poly, x)));
  }
  // the same trigonometric field through the finite-difference fallback
  const Field fd = from_closure(3, 3, [&](const Point& x, std::span<double> out) {
    const Point v = trig.values(x);
    for (int i = 0; i < 3; ++i) out[i] = v[i];
  });
  for (int k = 0; k < 20; ++k) {
    const Point x = random_point(3, rng);
    worst_fd = std::max(worst_fd, std::abs(good_identity_residual(fd, x)));
  }
  CHECK(worst_poly <= 1e-9);
  CHECK(worst_fd <= 1e-7);
}

TEST_CASE("deformation map inversion") {
  const Point x = make_point({0.4, -0.3});
  const DeformationMap id(dilation(2, 1.0), zero(2, 2), 0.0);
  CHECK((id.deform(x) - x).norm() == 0.0);
  CHECK((id.jacobian(x) - SmallMat::Identity(2, 2)).norm() == 0.0);
  const DeformationMap dil(dilation(2, 0.5), zero(2, 2), 0.1);
  CHECK((dil.invert(x) - x / 1.05).norm() < 1e-14);

  std::mt19937_64 rng(21);
  const Field eta = random_trig_field(3, rng), zeta = random_trig_field(3, rng);
  const DeformationMap m(eta, zeta, 0.01);
  for (int k = 0; k < 20; ++k) {
    const Point y = random_point(3, rng);
    CHECK((m.deform(m.invert(y)) - y).norm() <= 1e-12);
  }
  const DeformationMap wild(scaled(random_trig_field(2, rng), 50.0), zero(2, 2), 3.0);
  CHECK_THROWS(wild.invert(make_point({0.1, 0.2})));
}

TEST_CASE("compact support metadata") {
  const Field b = radial_bump(2, make_point({0.0, 0.0}), 0.5);
  REQUIRE(b.compactly_supported());
  CHECK(b.value(make_point({0.6, 0.0})) == 0.0);
  CHECK(b.value(make_point({0.0, 0.0})) == doctest::Approx(1.0));
  const Field v = product(b, dilation(2, 1.0));
  CHECK(v.compactly_supported());
  CHECK(v.values(make_point({0.4, 0.4})).norm() == 0.0);
}
