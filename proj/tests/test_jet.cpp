#include <doctest.h>

#include <cmath>

#include "innervar/jet.hpp"

using namespace innervar;

namespace {

// f(x, y, z) = exp(x y) sin(z) / (1 + x^2) + sqrt(2 + y^2 z^2) + tanh(x - z)
template <class T>
T sample(const T& x, const T& y, const T& z) {
  return exp(x * y) * sin(z) / (1.0 + x * x) + sqrt(2.0 + y * y * z * z) + tanh(x - z);
}

double sample_d(double x, double y, double z) {
  return std::exp(x * y) * std::sin(z) / (1.0 + x * x) + std::sqrt(2.0 + y * y * z * z) +
         std::tanh(x - z);
}

}  // namespace

TEST_CASE("jet derivatives of a composite expression match nested central differences") {
  const double p[3] = {0.3, -0.7, 0.45};
  const Jet x = Jet::variable(3, 3, 0, p[0]);
  const Jet y = Jet::variable(3, 3, 1, p[1]);
  const Jet z = Jet::variable(3, 3, 2, p[2]);
  const Jet f = sample(x, y, z);
  CHECK(f.v == doctest::Approx(sample_d(p[0], p[1], p[2])).epsilon(1e-15));

  auto fd = [&](auto&& fn, int i, double h) {
    double a[3] = {p[0], p[1], p[2]}, b[3] = {p[0], p[1], p[2]};
    a[i] += h;
    b[i] -= h;
    return (fn(a) - fn(b)) / (2 * h);
  };
  auto f0 = [](const double* q) { return sample_d(q[0], q[1], q[2]); };
  for (int i = 0; i < 3; ++i) CHECK(f.g[i] == doctest::Approx(fd(f0, i, 1e-5)).epsilon(1e-8));

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto gi = [&](const double* q) {
        double a[3] = {q[0], q[1], q[2]}, b[3] = {q[0], q[1], q[2]};
        a[i] += 1e-4;
        b[i] -= 1e-4;
        return (f0(a) - f0(b)) / 2e-4;
      };
      CHECK(f.h[i][j] == doctest::Approx(fd(gi, j, 1e-4)).epsilon(1e-5));
      CHECK(f.h[i][j] == doctest::Approx(f.h[j][i]).epsilon(1e-14));
    }

  // third derivatives against differences of the exact Hessian
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        auto hij = [&](const double* q) {
          return sample(Jet::variable(3, 2, 0, q[0]), Jet::variable(3, 2, 1, q[1]),
                        Jet::variable(3, 2, 2, q[2]))
              .h[i][j];
        };
        CHECK(f.t[i][j][k] == doctest::Approx(fd(hij, k, 1e-5)).epsilon(1e-7));
      }
}

TEST_CASE("compose reproduces direct evaluation of a nested expression") {
  // outer g(y1, y2) = y1^2 y2 + sin(y2); inner y1 = x^2 + z, y2 = x y z
  const double p[3] = {0.4, 1.1, -0.3};
  auto xs = [&](int order) {
    return std::array<Jet, 3>{Jet::variable(3, order, 0, p[0]), Jet::variable(3, order, 1, p[1]),
                              Jet::variable(3, order, 2, p[2])};
  };
  auto X = xs(3);
  const Jet y1 = X[0] * X[0] + X[2];
  const Jet y2 = X[0] * X[1] * X[2];
  const Jet direct = y1 * y1 * y2 + sin(y2);

  const Jet a = Jet::variable(2, 3, 0, y1.v), b = Jet::variable(2, 3, 1, y2.v);
  const Jet outer = a * a * b + sin(b);
  const std::array<Jet, 2> inner{y1, y2};
  const Jet c = compose(outer, inner);
  CHECK(c.v == doctest::Approx(direct.v).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) {
    CHECK(c.g[i] == doctest::Approx(direct.g[i]).epsilon(1e-13));
    for (int j = 0; j < 3; ++j) {
      CHECK(c.h[i][j] == doctest::Approx(direct.h[i][j]).epsilon(1e-13));
      for (int k = 0; k < 3; ++k) CHECK(c.t[i][j][k] == doctest::Approx(direct.t[i][j][k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("partial lowers the order and reads the next derivative block") {
  const Jet x = Jet::variable(2, 3, 0, 0.5), y = Jet::variable(2, 3, 1, 2.0);
  const Jet f = x * x * x * y;  // f_x = 3 x^2 y, f_xy = 3 x^2, f_xxy = 6x
  const Jet fx = f.partial(0);
  CHECK(fx.order == 2);
  CHECK(fx.v == doctest::Approx(3 * 0.25 * 2.0));
  CHECK(fx.g[1] == doctest::Approx(0.75));
  CHECK(fx.h[0][1] == doctest::Approx(3.0));
}

TEST_CASE("smooth step is flat outside (0, 1) and symmetric") {
  const Jet a = Jet::variable(1, 3, 0, -0.1);
  CHECK(smooth_step(a).v == 0.0);
  CHECK(smooth_step(a).g[0] == 0.0);
  const Jet b = Jet::variable(1, 3, 0, 0.3), c = Jet::variable(1, 3, 0, 0.7);
  CHECK(smooth_step(b).v + smooth_step(c).v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(smooth_step(b).g[0] == doctest::Approx(smooth_step(c).g[0]).epsilon(1e-13));
  const Jet d = Jet::variable(1, 3, 0, 0.5);
  CHECK(smooth_step(d).v == doctest::Approx(0.5));
}
