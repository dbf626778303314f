#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "innervar/errors.hpp"

namespace innervar::detail {

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1.
template <std::size_t N, class Rhs>
std::array<double, N> dormand_prince(const Rhs& f, double t0, double t1, std::array<double, N> y,
                                     double tol) {
  using State = std::array<double, N>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  auto axpy = [](const State& base, std::initializer_list<std::pair<double, const State*>> terms,
                 double h) {
    State r = base;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
    return r;
  };

  double t = t0;
  double h = t1 - t0;
  const double span = std::abs(t1 - t0);
  int steps = 0;
  while (t < t1) {
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h < 1e-14 * std::max(1.0, span) && t + h < t1)
      throw Error(ErrorCode::StiffTail, "step size underflow in profile integration");
    const State k1 = f(t, y);
    const State k2 = f(t + c2 * h, axpy(y, {{a21, &k1}}, h));
    const State k3 = f(t + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const State k4 = f(t + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State k5 = f(t + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State k6 =
        f(t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State k7 = f(t + h, y5);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      err = std::isfinite(e) ? std::max(err, std::abs(e) / sc) : HUGE_VAL;
    }
    if (err <= 1.0) {
      t = last ? t1 : t + h;
      y = y5;
    }
    const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 4.0);
    h *= std::isfinite(factor) ? factor : 0.2;
    if (++steps > 10000000) throw Error(ErrorCode::StiffTail, "too many integration steps");
  }
  return y;
}

}  // namespace innervar::detail
