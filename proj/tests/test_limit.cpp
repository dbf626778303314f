#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "innervar/errors.hpp"
#include "innervar/geometry.hpp"
#include "innervar/limit.hpp"

using namespace innervar;

namespace {

ConvergenceRecord sampled(ExtrapolationModel model, double (*f)(double), int n = 6, double eps0 = 0.1) {
  ConvergenceRecord r;
  r.model = model;
  for (double e : EpsilonSchedule::geometric(eps0, n, model).eps) r.push(e, f(e), 0, 0);
  r.fit();
  return r;
}

}  // namespace

TEST_CASE("schedule validation") {
  const auto s = EpsilonSchedule::geometric(0.04, 4);
  REQUIRE(s.eps.size() == 4);
  CHECK(s.eps[3] == doctest::Approx(0.005));
  CHECK_NOTHROW(s.validate());
  EpsilonSchedule bad;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.eps = {0.1, 0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.eps = {2.0, 0.5};
  bad.model = ExtrapolationModel::LinearInInverseLog;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(parse_extrapolation_model("linear-in-inverse-log") == ExtrapolationModel::LinearInInverseLog);
  CHECK_THROWS_AS(parse_extrapolation_model("quadratic"), Error);
}

TEST_CASE("linear data extrapolates exactly with rate one") {
  auto r = sampled(ExtrapolationModel::LinearInEps, [](double e) { return 3.0 + 2.0 * e; });
  CHECK(r.extrapolated == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.rate == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.rate_at_least(0.9));
  CHECK_FALSE(r.below_noise);
  r.target = 3.0;
  CHECK(r.gap() < 1e-12);
}

TEST_CASE("quadratic error reports rate two") {
  const auto r = sampled(ExtrapolationModel::LinearInEps, [](double e) { return 1.0 - 5.0 * e * e; });
  CHECK(r.rate == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.rate_at_least(0.9));
  CHECK_FALSE(r.rate_at_least(2.5));
}

TEST_CASE("sub-linear error fails the rate requirement") {
  const auto r = sampled(ExtrapolationModel::LinearInEps, [](double e) { return 1.0 + std::sqrt(e); });
  CHECK(r.rate == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_FALSE(r.rate_at_least(0.9));
}

TEST_CASE("constant data counts as converged") {
  const auto r = sampled(ExtrapolationModel::LinearInEps, [](double) { return 0.75; });
  CHECK(r.below_noise);
  CHECK(std::isnan(r.rate));
  CHECK(r.rate_at_least(0.9));
  CHECK(r.extrapolated == doctest::Approx(0.75));
}

TEST_CASE("inverse-log model recovers a logarithmic tail") {
  const auto r = sampled(
      ExtrapolationModel::LinearInInverseLog, [](double e) { return std::numbers::pi + 0.7 / std::abs(std::log(e)); }, 6,
      1e-2);
  CHECK(r.extrapolated == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("gap is relative to one plus the target") {
  ConvergenceRecord r;
  r.extrapolated = 1.1;
  r.target = 1.0;
  CHECK(r.gap() == doctest::Approx(0.05));
  r.target = 0.0;
  r.extrapolated = 1e-3;
  CHECK(r.gap() == doctest::Approx(1e-3));
}

TEST_CASE("csv layout") {
  auto r = sampled(ExtrapolationModel::LinearInEps, [](double e) { return e; }, 4);
  const std::string csv = r.csv();
  CHECK(csv.rfind("epsilon,value,target,gap,residual_1,residual_2\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 5);
}

TEST_CASE("vortex radial rule integrates the core") {
  const Rule1D rule = vortex_radial_rule(1e-3, 1.0, 8);
  double area = 0, rr = 0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    area += rule.w[k];
    rr += rule.w[k] * rule.x[k] * rule.x[k];
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}
