#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "innervar/errors.hpp"
#include "innervar/profiles.hpp"
#include "innervar/quadrature.hpp"

using namespace innervar;

namespace {

// Beta-function value of the integral of (1 - s^2)^a over [-1, 1]
double beta_oracle(double p) {
  const double a = 2.0 * (p - 1.0) / p;
  return std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
}

}  // namespace

TEST_CASE("c_p against closed forms") {
  CHECK(c_p(2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(c_p(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  for (double p : {1.25, 1.5, 3.0, 4.0, 6.0}) CHECK(c_p(p) == doctest::Approx(beta_oracle(p)).epsilon(1e-13));
  CHECK_THROWS_AS(c_p(0.5), Error);
}

TEST_CASE("p = 2 profile is tanh") {
  const ProfileTable t(2.0, false);
  double worst = 0, worst_d = 0;
  for (double s = -8.0; s <= 8.0; s += 0.0137) {
    const auto v = t.eval(s);
    worst = std::max(worst, std::abs(v.q - std::tanh(s)));
    const double sech2 = 1.0 / (std::cosh(s) * std::cosh(s));
    worst_d = std::max(worst_d, std::abs(v.d1 - sech2));
  }
  CHECK(worst <= 1e-9);
  CHECK(worst_d <= 1e-8);
  CHECK(std::isinf(t.s_star()));
  CHECK(t.s_max() == doctest::Approx(0.5 * std::log(2.0 / 1e-9)).epsilon(1e-6));

  const ProfileTable closed(2.0);
  CHECK(closed.s_max() == t.s_max());
  for (double s : {-3.0, 0.4, 2.5}) {
    const auto v = closed.eval(s), w = t.eval(s);
    CHECK(v.q == doctest::Approx(std::tanh(s)).epsilon(1e-15));
    CHECK(v.d2 == doctest::Approx(w.d2).epsilon(1e-7));
    CHECK(v.d3 == doctest::Approx(w.d3).epsilon(1e-5));
  }
}

TEST_CASE("profiles satisfy pointwise equipartition and the energy identity") {
  for (double p : {1.25, 1.5, 2.0, 3.0, 4.0}) {
    CAPTURE(p);
    const ProfileTable t(p, false);
    double worst = 0, worst_ode = 0;
    const double top = std::min(t.s_max(), 40.0);
    for (double s = -top; s <= top; s += top / 997.0) {
      const auto v = t.eval(s);
      worst = std::max(worst, std::abs(std::pow(std::abs(v.d1), p) - double_well(v.q)));
      // q'' = -(4/p) q (1 - q^2)^(4/p - 1)
      const double w = 1.0 - v.q * v.q;
      if (w > 0) worst_ode = std::max(worst_ode, std::abs(v.d2 + 4.0 / p * v.q * std::pow(w, 4.0 / p - 1.0)));
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_ode <= 1e-6);
    CHECK(t.eval(0.0).q == 0.0);
    CHECK(1.0 - t.eval(t.s_max()).q == doctest::Approx(1e-9).epsilon(1e-3));
    CHECK(1.0 - t.eval(t.s_core()).q == doctest::Approx(1e-2).epsilon(1e-9));

    // |q'|^p / p + (p - 1) W(q) / p over the line equals c_p; graded panels on
    // the half line, doubled by symmetry
    const double edge = std::isfinite(t.s_star()) ? t.s_star() : t.s_max();
    std::vector<double> br{0.0};
    for (double s = 0.25; s < edge; s *= 1.125) br.push_back(s);
    br.push_back(edge);
    const Rule1D r = composite_gauss(br, 12);
    double e = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto v = t.eval(r.x[k]);
      e += r.w[k] * (std::pow(std::abs(v.d1), p) / p + (p - 1.0) * double_well(v.q) / p);
    }
    CHECK(std::abs(2.0 * e - c_p(p)) <= 1e-8);
  }
}

TEST_CASE("p > 2 profiles reach the wells at a finite point") {
  const ProfileTable t(4.0);
  REQUIRE(std::isfinite(t.s_star()));
  CHECK(t.eval(t.s_star() + 0.1).q == 1.0);
  CHECK(t.eval(-t.s_star() - 0.1).q == -1.0);
  CHECK(t.eval(t.s_star() - 1e-3).q < 1.0);
  // closed form for p = 4: q' = sqrt(1 - q^2) gives q = sin(s), s* = pi / 2
  CHECK(t.s_star() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
  CHECK(t.eval(0.7).q == doctest::Approx(std::sin(0.7)).epsilon(1e-10));
}

TEST_CASE("derivatives are consistent across the table and the tail") {
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const ProfileTable t(p, false);
    for (double s : {0.3, 2.0, t.s_table() - 1e-4, t.s_table() + 1e-4, t.s_table() + 0.5}) {
      if (s >= t.s_star()) continue;
      const double h = 1e-5;
      const double fd = (t.eval(s + h).q - t.eval(s - h).q) / (2 * h);
      CHECK(std::abs(t.eval(s).d1 - fd) <= 1e-6 * std::abs(fd) + 1e-10);
    }
  }
}

TEST_CASE("vortex profile") {
  const GlProfile f;
  CHECK(f.slope_at_origin() == doctest::Approx(0.5832).epsilon(1e-3));
  double worst = 0;
  for (double r = 0.1; r <= 12.0; r += 0.0731) {
    const auto v = f.eval(r);
    const double res = v.d2 + v.d1 / r - v.q / (r * r) + v.q * (1.0 - v.q * v.q);
    worst = std::max(worst, std::abs(res));
    CHECK(v.q > 0.0);
    CHECK(v.q < 1.0);
  }
  CHECK(worst <= 1e-4);
  CHECK(f.eval(f.r_match() - 1e-9).q == doctest::Approx(f.eval(f.r_match() + 1e-9).q).epsilon(1e-9));
  CHECK(f.eval(f.r_core()).q == doctest::Approx(0.99).epsilon(1e-10));
  // H(s) = f(sqrt s)/sqrt s on both sides of the series switch
  for (double s : {0.01, 0.2, 0.3, 4.0, 80.0}) {
    const double r = std::sqrt(s);
    CHECK(f.ratio(s).q == doctest::Approx(f.eval(r).q / r).epsilon(1e-10));
    const double h = 1e-6 * std::max(1.0, s);
    CHECK(f.ratio(s).d1 == doctest::Approx((f.ratio(s + h).q - f.ratio(s - h).q) / (2 * h)).epsilon(1e-5));
  }
  const GlProfile sur(true);
  CHECK(sur.eval(1.0).q == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(sur.ratio(2.0).q == doctest::Approx(0.5));
}

TEST_CASE("phase-field ansatz") {
  const auto prof = std::make_shared<const ProfileTable>(2.0);
  const auto circle = make_circle(make_point({0, 0}), 1.0, 64);
  CHECK_THROWS_AS(ansatz_field(circle, 0.5, prof), Error);
  try {
    ansatz_field(circle, 0.5, prof);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonTooLarge);
  }
  const Field u = ansatz_field(circle, 0.05, prof);
  CHECK(std::abs(u.value(make_point({1.0, 0.0}))) < 1e-15);
  CHECK(u.value(make_point({1.1, 0.0})) == doctest::Approx(std::tanh(2.0)).epsilon(1e-9));
  CHECK(u.value(make_point({0.3, 0.0})) == -1.0);
  CHECK(u.value(make_point({2.0, 0.0})) == 1.0);
  // smooth through the blend region
  const Point x = make_point({1.35, 0.0});
  const Point g = u.gradient(x);
  const double h = 1e-6;
  CHECK(g[0] == doctest::Approx((u.value(make_point({1.35 + h, 0})) - u.value(make_point({1.35 - h, 0}))) / (2 * h))
                    .epsilon(1e-5)
                    .scale(1e-8));

  const Field uq = ansatz_field(circle, 0.05, prof, {LevelKind::Quadratic, 0.5});
  CHECK(uq.value(make_point({1.1, 0.0})) == doctest::Approx(std::tanh(0.105 / 0.05)).epsilon(1e-9));
}

TEST_CASE("vortex ansatz") {
  const auto prof = std::make_shared<const GlProfile>(true);
  const auto line = make_straight_filament(make_point({0, 0, 0}), 0, 1.0, true, 16);
  CHECK_THROWS_AS(gl_vortex_field(line, 0.5, prof, 0.5), Error);
  const Field u = gl_vortex_field(line, 0.1, prof, 1.0);
  const auto v = u.values(make_point({0.3, 0.2, 0.0}));
  const double rho = 0.2 / 0.1;
  CHECK(std::hypot(v[0], v[1]) == doctest::Approx(rho / std::sqrt(rho * rho + 2)).epsilon(1e-12));
  CHECK(u.values(make_point({0.3, 0.0, 0.0})).norm() == 0.0);
}
