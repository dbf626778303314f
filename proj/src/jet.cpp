#include "innervar/jet.hpp"

#include <algorithm>

namespace innervar {

namespace {

Jet like(const Jet& a, const Jet& b) {
  Jet r;
  r.dim = std::max(a.dim, b.dim);
  r.order = std::min(a.order, b.order);
  return r;
}

}  // namespace

Jet Jet::partial(int i) const {
  Jet r;
  r.dim = dim;
  r.order = order > 0 ? order - 1 : 0;
  if (order < 1) return r;
  r.v = g[i];
  if (order >= 2)
    for (int a = 0; a < dim; ++a) r.g[a] = h[i][a];
  if (order >= 3)
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) r.h[a][b] = t[i][a][b];
  return r;
}

Jet Jet::truncated(int new_order) const {
  if (new_order >= order) return *this;
  Jet r = Jet::constant(dim, new_order, v);
  if (new_order >= 1) r.g = g;
  if (new_order >= 2) r.h = h;
  return r;
}

Jet apply_unary(const Jet& a, double f0, double f1, double f2, double f3) {
  Jet r;
  r.dim = a.dim;
  r.order = a.order;
  r.v = f0;
  const int n = a.dim;
  if (a.order >= 1)
    for (int i = 0; i < n; ++i) r.g[i] = f1 * a.g[i];
  if (a.order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.h[i][j] = f2 * a.g[i] * a.g[j] + f1 * a.h[i][j];
  if (a.order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          r.t[i][j][k] = f3 * a.g[i] * a.g[j] * a.g[k] +
                         f2 * (a.h[i][j] * a.g[k] + a.h[i][k] * a.g[j] +
                               a.h[j][k] * a.g[i]) +
                         f1 * a.t[i][j][k];
  return r;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
  const int m = static_cast<int>(inner.size());
  Jet r;
  r.dim = inner.empty() ? 0 : inner[0].dim;
  r.order = outer.order;
  for (const auto& y : inner) r.order = std::min(r.order, y.order);
  const int n = r.dim;
  r.v = outer.v;
  if (r.order >= 1)
    for (int a = 0; a < n; ++a) {
      double s = 0;
      for (int i = 0; i < m; ++i) s += outer.g[i] * inner[i].g[a];
      r.g[a] = s;
    }
  if (r.order >= 2)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0;
        for (int i = 0; i < m; ++i) {
          s += outer.g[i] * inner[i].h[a][b];
          for (int j = 0; j < m; ++j)
            s += outer.h[i][j] * inner[i].g[a] * inner[j].g[b];
        }
        r.h[a][b] = s;
      }
  if (r.order >= 3)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double s = 0;
          for (int i = 0; i < m; ++i) {
            s += outer.g[i] * inner[i].t[a][b][c];
            for (int j = 0; j < m; ++j) {
              s += outer.h[i][j] * (inner[i].h[a][b] * inner[j].g[c] +
                                    inner[i].h[a][c] * inner[j].g[b] +
                                    inner[i].g[a] * inner[j].h[b][c]);
              for (int k = 0; k < m; ++k)
                s += outer.t[i][j][k] * inner[i].g[a] * inner[j].g[b] *
                     inner[k].g[c];
            }
          }
          r.t[a][b][c] = s;
        }
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = like(a, b);
  const int n = r.dim;
  r.v = a.v + b.v;
  if (r.order >= 1)
    for (int i = 0; i < n; ++i) r.g[i] = a.g[i] + b.g[i];
  if (r.order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
  if (r.order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) r.t[i][j][k] = a.t[i][j][k] + b.t[i][j][k];
  return r;
}

Jet operator-(const Jet& a) { return a * -1.0; }

Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

Jet operator*(const Jet& a, const Jet& b) {
  Jet r = like(a, b);
  const int n = r.dim;
  r.v = a.v * b.v;
  if (r.order >= 1)
    for (int i = 0; i < n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  if (r.order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] +
                    a.v * b.h[i][j];
  if (r.order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          r.t[i][j][k] = a.t[i][j][k] * b.v + a.h[i][j] * b.g[k] +
                         a.h[i][k] * b.g[j] + a.h[j][k] * b.g[i] +
                         a.g[i] * b.h[j][k] + a.g[j] * b.h[i][k] +
                         a.g[k] * b.h[i][j] + a.v * b.t[i][j][k];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet operator+(const Jet& a, double c) {
  Jet r = a;
  r.v += c;
  return r;
}
Jet operator+(double c, const Jet& a) { return a + c; }
Jet operator-(const Jet& a, double c) { return a + (-c); }
Jet operator-(double c, const Jet& a) { return (-a) + c; }

Jet operator*(const Jet& a, double c) {
  Jet r = a;
  const int n = a.dim;
  r.v *= c;
  if (a.order >= 1)
    for (int i = 0; i < n; ++i) r.g[i] *= c;
  if (a.order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.h[i][j] *= c;
  if (a.order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) r.t[i][j][k] *= c;
  return r;
}
Jet operator*(double c, const Jet& a) { return a * c; }
Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }

Jet& operator+=(Jet& a, const Jet& b) {
  a = a + b;
  return a;
}
Jet& operator-=(Jet& a, const Jet& b) {
  a = a - b;
  return a;
}

Jet reciprocal(const Jet& a) {
  const double x = a.v;
  const double f0 = 1.0 / x;
  return apply_unary(a, f0, -f0 * f0, 2.0 * f0 * f0 * f0,
                     -6.0 * f0 * f0 * f0 * f0);
}

Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return apply_unary(a, s, 0.5 / s, -0.25 / (s * a.v),
                     0.375 / (s * a.v * a.v));
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return apply_unary(a, e, e, e, e);
}

Jet log(const Jet& a) {
  const double x = a.v;
  return apply_unary(a, std::log(x), 1.0 / x, -1.0 / (x * x),
                     2.0 / (x * x * x));
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return apply_unary(a, s, c, -s, -c);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return apply_unary(a, c, -s, -c, s);
}

Jet tanh(const Jet& a) {
  const double th = std::tanh(a.v);
  const double s2 = 1.0 - th * th;
  return apply_unary(a, th, s2, -2.0 * th * s2, -2.0 * s2 * (1.0 - 3.0 * th * th));
}

Jet pow(const Jet& a, double e) {
  const double x = a.v;
  const double f0 = std::pow(x, e);
  const double f1 = e * std::pow(x, e - 1.0);
  const double f2 = e * (e - 1.0) * std::pow(x, e - 2.0);
  const double f3 = e * (e - 1.0) * (e - 2.0) * std::pow(x, e - 3.0);
  return apply_unary(a, f0, f1, f2, f3);
}

Jet square(const Jet& a) { return a * a; }

Jet flat_exp(const Jet& a) {
  const double x = a.v;
  if (x <= 0.0) return Jet::constant(a.dim, a.order, 0.0);
  const double e = std::exp(-1.0 / x);
  const double x2 = x * x;
  const double f1 = e / x2;
  const double f2 = e * (1.0 - 2.0 * x) / (x2 * x2);
  const double f3 = e * (1.0 - 6.0 * x + 6.0 * x2) / (x2 * x2 * x2);
  return apply_unary(a, e, f1, f2, f3);
}

Jet smooth_step(const Jet& a) {
  if (a.v <= 0.0) return Jet::constant(a.dim, a.order, 0.0);
  if (a.v >= 1.0) return Jet::constant(a.dim, a.order, 1.0);
  const Jet up = flat_exp(a);
  const Jet down = flat_exp(1.0 - a);
  return up / (up + down);
}

}  // namespace innervar
