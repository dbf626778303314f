#include "innervar/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "innervar/errors.hpp"

namespace innervar {

namespace {

// Base class for fields built from derivatives of other fields: evaluates
// its inputs at a seeded point one or two orders higher, so partial()
// differentiates with respect to the field's own coordinates.
class DerivedField : public FieldImpl {
 public:
  DerivedField(int dim, int components, int extra_order)
      : FieldImpl(dim, components), extra_(extra_order) {}

  void at(const Point& x, int order, std::span<Jet> out) const final {
    const int inner = std::min(order + extra_, kMaxOrder);
    compute(x, inner, inner - extra_, out);
  }

 protected:
  virtual void compute(const Point& x, int inner_order, int out_order, std::span<Jet> out) const = 0;

 private:
  int extra_;
};

class DivergenceField final : public DerivedField {
 public:
  explicit DivergenceField(Field v) : DerivedField(v.dim(), 1, 1), v_(std::move(v)) {}
  void compute(const Point& x, int inner, int, std::span<Jet> out) const override {
    auto j = v_.at(x, inner);
    Jet d = j[0].partial(0);
    for (int i = 1; i < dim(); ++i) d += j[i].partial(i);
    out[0] = d;
  }

 private:
  Field v_;
};

class ZetaEtaField final : public DerivedField {
 public:
  explicit ZetaEtaField(Field eta) : DerivedField(eta.dim(), eta.dim(), 1), eta_(std::move(eta)) {
    set_support(eta_.support());
  }
  void compute(const Point& x, int inner, int out_order, std::span<Jet> out) const override {
    const int n = dim();
    auto e = eta_.at(x, inner);
    Jet div = e[0].partial(0);
    for (int i = 1; i < n; ++i) div += e[i].partial(i);
    for (int i = 0; i < n; ++i) {
      Jet r = -(div * e[i].truncated(out_order));
      for (int j = 0; j < n; ++j) r += e[j].truncated(out_order) * e[i].partial(j);
      out[i] = r;
    }
  }

 private:
  Field eta_;
};

class X0Field final : public DerivedField {
 public:
  X0Field(Field u, Field eta, Field zeta)
      : DerivedField(u.dim(), u.components(), 2),
        u_(std::move(u)),
        eta_(std::move(eta)),
        zeta_(std::move(zeta)) {
    if (eta_.support() && zeta_.support())
      set_support(Box{eta_.support()->lo.cwiseMin(zeta_.support()->lo),
                      eta_.support()->hi.cwiseMax(zeta_.support()->hi)});
  }
  void compute(const Point& x, int inner, int out_order, std::span<Jet> out) const override {
    const int n = dim();
    auto u = u_.at(x, inner);
    auto e = eta_.at(x, std::max(out_order + 1, 0));
    auto z = zeta_.at(x, out_order);
    // w = 2 (grad eta) eta - zeta
    std::array<Jet, kMaxDim> w;
    for (int i = 0; i < n; ++i) {
      Jet r = z[i] * -1.0;
      for (int j = 0; j < n; ++j) r += 2.0 * (e[i].partial(j) * e[j].truncated(out_order));
      w[i] = r;
    }
    for (int c = 0; c < components(); ++c) {
      Jet r = Jet::constant(n, out_order, 0.0);
      for (int i = 0; i < n; ++i) {
        const Jet ui = u[c].partial(i);
        r += ui.truncated(out_order) * w[i];
        for (int j = 0; j < n; ++j)
          r += ui.partial(j) * e[i].truncated(out_order) * e[j].truncated(out_order);
      }
      out[c] = r;
    }
  }

 private:
  Field u_, eta_, zeta_;
};

class MinusGradDotField final : public DerivedField {
 public:
  MinusGradDotField(Field u, Field eta)
      : DerivedField(u.dim(), u.components(), 1), u_(std::move(u)), eta_(std::move(eta)) {
    set_support(eta_.support());
  }
  void compute(const Point& x, int inner, int out_order, std::span<Jet> out) const override {
    auto u = u_.at(x, inner);
    auto e = eta_.at(x, out_order);
    for (int c = 0; c < components(); ++c) {
      Jet r = Jet::constant(dim(), out_order, 0.0);
      for (int i = 0; i < dim(); ++i) r -= u[c].partial(i) * e[i];
      out[c] = r;
    }
  }

 private:
  Field u_, eta_;
};

void check_vector(const Field& eta) {
  if (eta.components() != eta.dim())
    throw Error(ErrorCode::DimensionMismatch, "expected a vector field");
}

}  // namespace

double divergence(const Field& v, const Point& x) {
  check_vector(v);
  const SmallMat j = v.jacobian(x);
  return j.trace();
}

Field divergence_field(const Field& v) {
  check_vector(v);
  return Field(std::make_shared<DivergenceField>(v));
}

Field zeta_eta(const Field& eta) {
  check_vector(eta);
  return Field(std::make_shared<ZetaEtaField>(eta));
}

Field x0_field(const Field& u, const Field& eta, const Field& zeta) {
  check_vector(eta);
  check_vector(zeta);
  if (u.dim() != eta.dim() || eta.dim() != zeta.dim())
    throw Error(ErrorCode::DimensionMismatch, "x0 field inputs live in different dimensions");
  return Field(std::make_shared<X0Field>(u, eta, zeta));
}

Field minus_grad_dot(const Field& u, const Field& eta) {
  check_vector(eta);
  if (u.dim() != eta.dim())
    throw Error(ErrorCode::DimensionMismatch, "-grad u . eta inputs live in different dimensions");
  return Field(std::make_shared<MinusGradDotField>(u, eta));
}

DetCoefficients det_expansion(const Field& eta, const Field& zeta, const Point& x) {
  const SmallMat a = eta.jacobian(x);
  const SmallMat b = zeta.jacobian(x);
  DetCoefficients c;
  c.c1 = a.trace();
  c.c2 = b.trace() + c.c1 * c.c1 - (a * a).trace();
  return c;
}

double good_identity_residual(const Field& eta, const Point& x) {
  const SmallMat a = eta.jacobian(x);
  const double lhs = a.trace() * a.trace() - (a * a).trace();
  // div((div eta) eta - (eta . grad) eta) = -div zeta_eta
  const double rhs = -divergence(zeta_eta(eta), x);
  return lhs - rhs;
}

DeformationMap::DeformationMap(Field eta, Field zeta, double t)
    : eta_(std::move(eta)), zeta_(std::move(zeta)), t_(t) {
  check_vector(eta_);
  check_vector(zeta_);
}

Point DeformationMap::deform(const Point& x) const {
  return x + t_ * eta_.values(x) + 0.5 * t_ * t_ * zeta_.values(x);
}

SmallMat DeformationMap::jacobian(const Point& x) const {
  const int n = static_cast<int>(x.size());
  return SmallMat::Identity(n, n) + t_ * eta_.jacobian(x) + 0.5 * t_ * t_ * zeta_.jacobian(x);
}

Point DeformationMap::invert(const Point& y) const {
  Point x = y - t_ * eta_.values(y);
  Point r = deform(x) - y;
  double rn = r.norm();
  const double target = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, y.norm());
  for (int it = 0; it < 50 && rn > target; ++it) {
    const SmallMat jac = jacobian(x);
    const Point dx = jac.partialPivLu().solve(r);
    if (!dx.allFinite()) break;
    double step = 1.0;
    Point trial = x - dx;
    Point rt = deform(trial) - y;
    while (rt.norm() >= rn && step > 1e-4) {
      step *= 0.5;
      trial = x - step * dx;
      rt = deform(trial) - y;
    }
    if (rt.norm() >= rn) break;
    x = trial;
    r = rt;
    rn = rt.norm();
  }
  if (!(rn <= 1e-12))
    throw Error(ErrorCode::NonInvertible, "Newton inversion of the deformation did not converge");
  return x;
}

double diffeomorphism_bound(const Field& eta, const Field& zeta, std::span<const Point> samples) {
  double l1 = 0.0, l2 = 0.0;
  for (const auto& x : samples) {
    l1 = std::max(l1, eta.jacobian(x).norm());
    l2 = std::max(l2, zeta.jacobian(x).norm());
  }
  double t;
  if (l2 < 1e-300)
    t = l1 > 0.0 ? 1.0 / l1 : std::numeric_limits<double>::infinity();
  else
    t = (-l1 + std::sqrt(l1 * l1 + 2.0 * l2)) / l2;
  return 0.5 * t;
}

}  // namespace innervar
