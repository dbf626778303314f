#pragma once

#include <array>
#include <cmath>
#include <span>

namespace innervar {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxOrder = 3;

/// Truncated multivariate Taylor jet: a value together with all partial
/// derivatives up to `order` (at most 3) with respect to `dim` (at most 3)
/// independent variables.
///
/// Jets are the workhorse of the field layer. Every built-in field is an
/// expression evaluated on jets, so gradients, Hessians and third derivatives
/// come out exact to rounding, and composition of fields is just evaluation
/// on jet-valued inputs.
struct Jet {
  int dim = 0;
  int order = 0;
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<std::array<double, kMaxDim>, kMaxDim> h{};
  std::array<std::array<std::array<double, kMaxDim>, kMaxDim>, kMaxDim> t{};

  static Jet constant(int dim, int order, double value) {
    Jet j;
    j.dim = dim;
    j.order = order;
    j.v = value;
    return j;
  }

  /// The coordinate function x_i, seeded at value `value`.
  static Jet variable(int dim, int order, int i, double value) {
    Jet j = constant(dim, order, value);
    if (order >= 1) j.g[i] = 1.0;
    return j;
  }

  /// Jet of the partial derivative d/dx_i, one order lower.
  Jet partial(int i) const;

  /// Same jet with derivatives above `new_order` dropped.
  Jet truncated(int new_order) const;
};

/// Apply a univariate function given its value and first three derivatives
/// at a.v (Faa di Bruno up to third order).
Jet apply_unary(const Jet& a, double f0, double f1, double f2, double f3);

/// Evaluate the jet of outer(inner(x)), where `outer` holds derivatives with
/// respect to y = inner(x) at y0 = inner values, and `inner` holds one jet per
/// component of y.
Jet compose(const Jet& outer, std::span<const Jet> inner);

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(const Jet& a, double c);
Jet operator+(double c, const Jet& a);
Jet operator-(const Jet& a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(const Jet& a, double c);
Jet operator*(double c, const Jet& a);
Jet operator/(const Jet& a, double c);

Jet& operator+=(Jet& a, const Jet& b);
Jet& operator-=(Jet& a, const Jet& b);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tanh(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet square(const Jet& a);

/// exp(-1/a) for a > 0 and 0 otherwise; the C-infinity building block of the
/// bump and cutoff functions.
Jet flat_exp(const Jet& a);

/// Smooth monotone step: 0 for a <= 0, 1 for a >= 1, C-infinity in between.
Jet smooth_step(const Jet& a);

}  // namespace innervar
