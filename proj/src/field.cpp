#include "innervar/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "innervar/errors.hpp"

namespace innervar {

bool Box::contains(const Point& x) const {
  for (int i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

std::array<Jet, kMaxDim> seed(const Point& x, int order) {
  std::array<Jet, kMaxDim> s;
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) s[i] = Jet::variable(n, order, i, x[i]);
  return s;
}

Point make_point(std::initializer_list<double> values) {
  Point p(static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) p[i++] = v;
  return p;
}

void FieldImpl::apply(std::span<const Jet> x, std::span<Jet> out) const {
  Point p(dim_);
  int order = kMaxOrder;
  for (int i = 0; i < dim_; ++i) {
    p[i] = x[i].v;
    order = std::min(order, x[i].order);
  }
  JetArray local;
  at(p, order, std::span<Jet>(local.data(), components_));
  for (int c = 0; c < components_; ++c)
    out[c] = innervar::compose(local[c], x.subspan(0, dim_));
}

void FieldImpl::at(const Point& x, int order, std::span<Jet> out) const {
  auto s = seed(x, order);
  apply(std::span<const Jet>(s.data(), dim_), out);
}

JetArray Field::apply(std::span<const Jet> x) const {
  JetArray out;
  impl_->apply(x, std::span<Jet>(out.data(), components()));
  return out;
}

JetArray Field::at(const Point& x, int order) const {
  if (x.size() != dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension does not match field");
  JetArray out;
  impl_->at(x, order, std::span<Jet>(out.data(), components()));
  return out;
}

double Field::value(const Point& x) const { return at(x, 0)[0].v; }

Point Field::values(const Point& x) const {
  auto j = at(x, 0);
  Point v(components());
  for (int c = 0; c < components(); ++c) v[c] = j[c].v;
  return v;
}

Point Field::gradient(const Point& x) const {
  auto j = at(x, 1);
  Point g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = j[0].g[i];
  return g;
}

SmallMat Field::hessian(const Point& x) const {
  auto j = at(x, 2);
  const int n = dim();
  SmallMat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = 0.5 * (j[0].h[a][b] + j[0].h[b][a]);
  return h;
}

SmallMat Field::jacobian(const Point& x) const {
  auto j = at(x, 1);
  SmallMat m(components(), dim());
  for (int c = 0; c < components(); ++c)
    for (int i = 0; i < dim(); ++i) m(c, i) = j[c].g[i];
  return m;
}

std::array<SmallMat, kMaxComponents> Field::second_derivatives(const Point& x) const {
  auto j = at(x, 2);
  const int n = dim();
  std::array<SmallMat, kMaxComponents> out;
  for (int c = 0; c < components(); ++c) {
    out[c].resize(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[c](a, b) = 0.5 * (j[c].h[a][b] + j[c].h[b][a]);
  }
  return out;
}

namespace fields {

namespace {

using JetSpan = std::span<const Jet>;

Jet zero_like(JetSpan x) {
  return Jet::constant(x[0].dim, x[0].order, 0.0);
}

int min_order(JetSpan x, int n) {
  int order = kMaxOrder;
  for (int i = 0; i < n; ++i) order = std::min(order, x[i].order);
  return order;
}

class ConstantField final : public FieldImpl {
 public:
  ConstantField(int dim, Point value)
      : FieldImpl(dim, static_cast<int>(value.size())), value_(std::move(value)) {}
  void apply(JetSpan x, std::span<Jet> out) const override {
    for (int c = 0; c < components(); ++c)
      out[c] = Jet::constant(x[0].dim, min_order(x, dim()), value_[c]);
  }

 private:
  Point value_;
};

class LinearField final : public FieldImpl {
 public:
  LinearField(SmallMat a, Point b)
      : FieldImpl(static_cast<int>(a.cols()), static_cast<int>(a.rows())),
        a_(std::move(a)),
        b_(std::move(b)) {}
  void apply(JetSpan x, std::span<Jet> out) const override {
    for (int c = 0; c < components(); ++c) {
      Jet r = zero_like(x);
      r.order = min_order(x, dim());
      r.v = b_[c];
      for (int i = 0; i < dim(); ++i)
        if (a_(c, i) != 0.0) r += x[i] * a_(c, i);
      out[c] = r;
    }
  }

 private:
  SmallMat a_;
  Point b_;
};

class PolynomialField final : public FieldImpl {
 public:
  PolynomialField(int dim, std::vector<std::vector<Monomial>> terms, std::optional<Point> center)
      : FieldImpl(dim, static_cast<int>(terms.size())),
        terms_(std::move(terms)),
        center_(std::move(center)) {
    for (const auto& comp : terms_)
      for (const auto& m : comp)
        for (int i = 0; i < dim; ++i) max_power_ = std::max(max_power_, m.power[i]);
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    const int n = dim();
    // powers[i][k] = (x_i - c_i)^k
    std::vector<std::array<Jet, kMaxDim>> powers(max_power_ + 1);
    for (int i = 0; i < n; ++i) {
      Jet xi = x[i];
      if (center_) xi = xi - (*center_)[i];
      powers[0][i] = Jet::constant(xi.dim, xi.order, 1.0);
      for (int k = 1; k <= max_power_; ++k) powers[k][i] = powers[k - 1][i] * xi;
    }
    for (int c = 0; c < components(); ++c) {
      Jet r = zero_like(x);
      r.order = min_order(x, n);
      for (const auto& m : terms_[c]) {
        Jet term = Jet::constant(r.dim, r.order, m.coef);
        for (int i = 0; i < n; ++i)
          if (m.power[i] > 0) term = term * powers[m.power[i]][i];
        r += term;
      }
      out[c] = r;
    }
  }

 private:
  std::vector<std::vector<Monomial>> terms_;
  std::optional<Point> center_;
  int max_power_ = 0;
};

class TrigField final : public FieldImpl {
 public:
  TrigField(int dim, std::vector<std::vector<TrigTerm>> terms)
      : FieldImpl(dim, static_cast<int>(terms.size())), terms_(std::move(terms)) {}
  void apply(JetSpan x, std::span<Jet> out) const override {
    for (int c = 0; c < components(); ++c) {
      Jet r = zero_like(x);
      r.order = min_order(x, dim());
      for (const auto& t : terms_[c]) {
        Jet arg = Jet::constant(r.dim, r.order, t.phase);
        for (int i = 0; i < dim(); ++i)
          if (t.k[i] != 0.0) arg += x[i] * t.k[i];
        r += sin(arg) * t.coef;
      }
      out[c] = r;
    }
  }

 private:
  std::vector<std::vector<TrigTerm>> terms_;
};

Jet masked_radius_sq(JetSpan x, int n, const Point& center, const std::array<bool, kMaxDim>& axes) {
  Jet r2 = zero_like(x);
  r2.order = min_order(x, n);
  for (int i = 0; i < n; ++i)
    if (axes[i]) r2 += square(x[i] - center[i]);
  return r2;
}

std::optional<Box> masked_box(int dim, const Point& center, double radius,
                              const std::array<bool, kMaxDim>& axes) {
  for (int i = 0; i < dim; ++i)
    if (!axes[i]) return std::nullopt;
  Box b{center.array() - radius, center.array() + radius};
  return b;
}

class RadialBump final : public FieldImpl {
 public:
  RadialBump(int dim, Point center, double radius, std::array<bool, kMaxDim> axes)
      : FieldImpl(dim, 1), center_(std::move(center)), radius_(radius), axes_(axes) {
    set_support(masked_box(dim, center_, radius_, axes_));
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    const Jet s = masked_radius_sq(x, dim(), center_, axes_) / (radius_ * radius_);
    out[0] = flat_exp(1.0 - s) * std::exp(1.0);
  }

 private:
  Point center_;
  double radius_;
  std::array<bool, kMaxDim> axes_;
};

class Plateau final : public FieldImpl {
 public:
  Plateau(int dim, Point center, double inner, double outer, std::array<bool, kMaxDim> axes)
      : FieldImpl(dim, 1), center_(std::move(center)), inner_(inner), outer_(outer), axes_(axes) {
    set_support(masked_box(dim, center_, outer_, axes_));
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    const Jet r2 = masked_radius_sq(x, dim(), center_, axes_);
    const double a = inner_ * inner_, b = outer_ * outer_;
    out[0] = 1.0 - smooth_step((r2 - a) / (b - a));
  }

 private:
  Point center_;
  double inner_, outer_;
  std::array<bool, kMaxDim> axes_;
};

class ScaledField final : public FieldImpl {
 public:
  ScaledField(Field f, double c) : FieldImpl(f.dim(), f.components()), f_(std::move(f)), c_(c) {
    set_support(f_.support());
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    f_.apply(x, out);
    for (int c = 0; c < components(); ++c) out[c] = out[c] * c_;
  }

 private:
  Field f_;
  double c_;
};

std::optional<Box> box_union(const std::optional<Box>& a, const std::optional<Box>& b) {
  if (!a || !b) return std::nullopt;
  return Box{a->lo.cwiseMin(b->lo), a->hi.cwiseMax(b->hi)};
}

std::optional<Box> box_intersection(const std::optional<Box>& a, const std::optional<Box>& b) {
  if (!a) return b;
  if (!b) return a;
  return Box{a->lo.cwiseMax(b->lo), a->hi.cwiseMin(b->hi)};
}

class SumField final : public FieldImpl {
 public:
  SumField(Field a, Field b, double sign)
      : FieldImpl(a.dim(), a.components()), a_(std::move(a)), b_(std::move(b)), sign_(sign) {
    set_support(box_union(a_.support(), b_.support()));
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    JetArray tmp;
    a_.apply(x, out);
    b_.apply(x, std::span<Jet>(tmp.data(), components()));
    for (int c = 0; c < components(); ++c) out[c] = out[c] + tmp[c] * sign_;
  }

 private:
  Field a_, b_;
  double sign_;
};

class ProductField final : public FieldImpl {
 public:
  ProductField(Field s, Field f)
      : FieldImpl(f.dim(), f.components()), s_(std::move(s)), f_(std::move(f)) {
    set_support(box_intersection(s_.support(), f_.support()));
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    JetArray sv;
    s_.apply(x, std::span<Jet>(sv.data(), 1));
    f_.apply(x, out);
    for (int c = 0; c < components(); ++c) out[c] = out[c] * sv[0];
  }

 private:
  Field s_, f_;
};

class StackField final : public FieldImpl {
 public:
  explicit StackField(std::vector<Field> parts)
      : FieldImpl(parts.front().dim(), static_cast<int>(parts.size())), parts_(std::move(parts)) {
    std::optional<Box> box = parts_.front().support();
    for (const auto& p : parts_) box = box_union(box, p.support());
    set_support(box);
  }
  void apply(JetSpan x, std::span<Jet> out) const override {
    JetArray tmp;
    for (int c = 0; c < components(); ++c) {
      parts_[c].apply(x, std::span<Jet>(tmp.data(), 1));
      out[c] = tmp[0];
    }
  }

 private:
  std::vector<Field> parts_;
};

class ComposedField final : public FieldImpl {
 public:
  ComposedField(Field outer, Field inner)
      : FieldImpl(inner.dim(), outer.components()), outer_(std::move(outer)), inner_(std::move(inner)) {}
  void apply(JetSpan x, std::span<Jet> out) const override {
    JetArray y;
    inner_.apply(x, std::span<Jet>(y.data(), inner_.components()));
    outer_.apply(std::span<const Jet>(y.data(), inner_.components()), out);
  }

 private:
  Field outer_, inner_;
};

class ClosureField final : public FieldImpl {
 public:
  ClosureField(int dim, int comps, std::function<void(const Point&, std::span<double>)> fn)
      : FieldImpl(dim, comps), fn_(std::move(fn)) {}

  void at(const Point& x, int order, std::span<Jet> out) const override {
    const int n = dim(), m = components();
    const int ord = std::min(order, 2);
    std::array<double, kMaxComponents> f0{};
    fn_(x, std::span<double>(f0.data(), m));
    for (int c = 0; c < m; ++c) out[c] = Jet::constant(n, ord, f0[c]);
    if (ord == 0) return;
    const double scale = std::max(1.0, x.norm());
    const double eps = std::numeric_limits<double>::epsilon();
    const double h1 = std::cbrt(eps) * scale;
    const double h2 = std::pow(eps, 0.25) * scale;
    std::array<double, kMaxComponents> fp{}, fm{};
    auto eval = [&](const Point& p, std::array<double, kMaxComponents>& r) {
      fn_(p, std::span<double>(r.data(), m));
    };
    for (int i = 0; i < n; ++i) {
      Point xp = x, xm = x;
      xp[i] += h1;
      xm[i] -= h1;
      eval(xp, fp);
      eval(xm, fm);
      for (int c = 0; c < m; ++c) out[c].g[i] = (fp[c] - fm[c]) / (2.0 * h1);
    }
    if (ord < 2) return;
    for (int i = 0; i < n; ++i) {
      Point xp = x, xm = x;
      xp[i] += h2;
      xm[i] -= h2;
      eval(xp, fp);
      eval(xm, fm);
      for (int c = 0; c < m; ++c) out[c].h[i][i] = (fp[c] - 2.0 * f0[c] + fm[c]) / (h2 * h2);
      for (int j = i + 1; j < n; ++j) {
        std::array<double, kMaxComponents> fpp{}, fpm{}, fmp{}, fmm{};
        Point p = x;
        p[i] += h2, p[j] += h2;
        eval(p, fpp);
        p = x, p[i] += h2, p[j] -= h2;
        eval(p, fpm);
        p = x, p[i] -= h2, p[j] += h2;
        eval(p, fmp);
        p = x, p[i] -= h2, p[j] -= h2;
        eval(p, fmm);
        for (int c = 0; c < m; ++c) {
          const double v = (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / (4.0 * h2 * h2);
          out[c].h[i][j] = v;
          out[c].h[j][i] = v;
        }
      }
    }
  }

 private:
  std::function<void(const Point&, std::span<double>)> fn_;
};

}  // namespace

Field constant(int dim, const Point& value) {
  return Field(std::make_shared<ConstantField>(dim, value));
}

Field zero(int dim, int components) {
  Field f(std::make_shared<ConstantField>(dim, Point::Zero(components)));
  return f;
}

Field linear(const SmallMat& a, const Point& b) {
  return Field(std::make_shared<LinearField>(a, b));
}

Field dilation(int dim, double a) {
  return linear(SmallMat::Identity(dim, dim) * a, Point::Zero(dim));
}

Field rotation2d(double omega) {
  SmallMat a(2, 2);
  a << 0.0, omega, -omega, 0.0;
  return linear(a, Point::Zero(2));
}

Field rotation3d(const Point& w) {
  SmallMat a(3, 3);
  a << 0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0;
  return linear(a, Point::Zero(3));
}

Field coordinate(int dim, int i) {
  SmallMat a = SmallMat::Zero(1, dim);
  a(0, i) = 1.0;
  return linear(a, Point::Zero(1));
}

Field polynomial(int dim, std::vector<std::vector<Monomial>> components, std::optional<Point> center) {
  return Field(std::make_shared<PolynomialField>(dim, std::move(components), std::move(center)));
}

Field trigonometric(int dim, std::vector<std::vector<TrigTerm>> components) {
  return Field(std::make_shared<TrigField>(dim, std::move(components)));
}

Field radial_bump(int dim, const Point& center, double radius, std::array<bool, kMaxDim> axes) {
  return Field(std::make_shared<RadialBump>(dim, center, radius, axes));
}

Field plateau(int dim, const Point& center, double inner, double outer,
              std::array<bool, kMaxDim> axes) {
  return Field(std::make_shared<Plateau>(dim, center, inner, outer, axes));
}

Field scaled(const Field& f, double c) { return Field(std::make_shared<ScaledField>(f, c)); }

Field sum(const Field& a, const Field& b) {
  if (a.components() != b.components() || a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "sum of fields with different shapes");
  return Field(std::make_shared<SumField>(a, b, 1.0));
}

Field difference(const Field& a, const Field& b) {
  if (a.components() != b.components() || a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "difference of fields with different shapes");
  return Field(std::make_shared<SumField>(a, b, -1.0));
}

Field product(const Field& s, const Field& f) {
  if (s.components() != 1 || s.dim() != f.dim())
    throw Error(ErrorCode::DimensionMismatch, "product needs a scalar first factor");
  return Field(std::make_shared<ProductField>(s, f));
}

Field stack(const std::vector<Field>& parts) {
  if (parts.empty() || static_cast<int>(parts.size()) > kMaxComponents)
    throw Error(ErrorCode::DimensionMismatch, "stack needs 1..3 scalar fields");
  for (const auto& p : parts)
    if (p.components() != 1 || p.dim() != parts.front().dim())
      throw Error(ErrorCode::DimensionMismatch, "stack needs scalar fields of equal dimension");
  return Field(std::make_shared<StackField>(parts));
}

Field compose(const Field& outer, const Field& inner) {
  if (outer.dim() != inner.components())
    throw Error(ErrorCode::DimensionMismatch, "composition shapes do not match");
  return Field(std::make_shared<ComposedField>(outer, inner));
}

Field from_closure(int dim, int components, std::function<void(const Point&, std::span<double>)> fn) {
  return Field(std::make_shared<ClosureField>(dim, components, std::move(fn)));
}

}  // namespace fields

}  // namespace innervar
