#include "innervar/geometry.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "innervar/errors.hpp"

namespace innervar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point unit(int dim, int axis) {
  Point e = Point::Zero(dim);
  e[axis] = 1.0;
  return e;
}

[[noreturn]] void unsupported(const std::string& what, const std::string& kind) {
  throw Error(ErrorCode::DimensionMismatch, what + " is not defined for " + kind);
}

Jet radius_from(std::span<const Jet> x, const Point& c, int n) {
  Jet r2 = square(x[0] - c[0]);
  for (int i = 1; i < n; ++i) r2 += square(x[i] - c[i]);
  return sqrt(r2);
}

class FlatPatch final : public Interface {
 public:
  explicit FlatPatch(FlatPatchSpec s) : Interface(s.dim, 1), s_(std::move(s)) {
    if (s_.dim < 2 || s_.dim > 3) throw Error(ErrorCode::DimensionMismatch, "flat patch needs N = 2 or 3");
  }
  std::string kind() const override { return "flat"; }
  bool closed() const override { return s_.periodic; }
  double measure() const override {
    double m = 1.0;
    for (int i = 0; i < s_.dim; ++i)
      if (i != s_.normal_axis) m *= s_.hi[i] - s_.lo[i];
    return m;
  }
  std::vector<SurfaceNode> nodes() const override {
    std::vector<Rule1D> rules;
    std::vector<int> axes;
    for (int i = 0; i < s_.dim; ++i) {
      if (i == s_.normal_axis) continue;
      axes.push_back(i);
      if (s_.periodic) {
        rules.push_back(periodic_trapezoid(s_.panels * s_.order, s_.lo[i], s_.hi[i]));
      } else {
        std::vector<double> br;
        for (int k = 0; k <= s_.panels; ++k)
          br.push_back(s_.lo[i] + (s_.hi[i] - s_.lo[i]) * k / s_.panels);
        rules.push_back(composite_gauss(br, s_.order));
      }
    }
    const BulkRule grid = tensor_rule(rules);
    std::vector<SurfaceNode> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      SurfaceNode n;
      n.x = Point::Zero(s_.dim);
      for (std::size_t a = 0; a < axes.size(); ++a) n.x[axes[a]] = grid.nodes[k][a];
      n.x[s_.normal_axis] = s_.offset;
      n.w = grid.weights[k];
      n.n_tangent = static_cast<int>(axes.size());
      for (std::size_t a = 0; a < axes.size(); ++a) n.tangent[a] = unit(s_.dim, axes[a]);
      n.n_normal = 1;
      n.normal[0] = unit(s_.dim, s_.normal_axis);
      out.push_back(n);
    }
    return out;
  }
  InterfacePtr refined(int factor) const override {
    FlatPatchSpec s = s_;
    s.panels *= factor;
    return std::make_shared<FlatPatch>(s);
  }
  double focal_distance() const override { return kInf; }
  Jet signed_distance(std::span<const Jet> x) const override { return x[s_.normal_axis] - s_.offset; }
  void closest_point(std::span<const Jet> x, std::span<Jet> out) const override {
    for (int i = 0; i < s_.dim; ++i) out[i] = x[i];
    out[s_.normal_axis] = Jet::constant(x[0].dim, x[0].order, s_.offset);
  }
  void normal(std::span<const Jet> x, std::span<Jet> out) const override {
    for (int i = 0; i < s_.dim; ++i)
      out[i] = Jet::constant(x[0].dim, x[0].order, i == s_.normal_axis ? 1.0 : 0.0);
  }
  Jet quadratic_level(std::span<const Jet> x) const override { return signed_distance(x); }

 private:
  FlatPatchSpec s_;
};

class RoundShape : public Interface {
 public:
  RoundShape(int dim, Point center, double radius)
      : Interface(dim, 1), c_(std::move(center)), r_(radius) {}
  bool closed() const override { return true; }
  double focal_distance() const override { return r_; }
  Jet signed_distance(std::span<const Jet> x) const override {
    return radius_from(x, c_, ambient_dim()) - r_;
  }
  void closest_point(std::span<const Jet> x, std::span<Jet> out) const override {
    const Jet rho = radius_from(x, c_, ambient_dim());
    const Jet s = reciprocal(rho) * r_;
    for (int i = 0; i < ambient_dim(); ++i) out[i] = (x[i] - c_[i]) * s + c_[i];
  }
  void normal(std::span<const Jet> x, std::span<Jet> out) const override {
    const Jet inv = reciprocal(radius_from(x, c_, ambient_dim()));
    for (int i = 0; i < ambient_dim(); ++i) out[i] = (x[i] - c_[i]) * inv;
  }
  Jet quadratic_level(std::span<const Jet> x) const override {
    Jet r2 = square(x[0] - c_[0]);
    for (int i = 1; i < ambient_dim(); ++i) r2 += square(x[i] - c_[i]);
    return (r2 - r_ * r_) / (2.0 * r_);
  }
  const Point& center() const { return c_; }
  double radius() const { return r_; }

 protected:
  Point c_;
  double r_;
};

class Circle final : public RoundShape {
 public:
  Circle(Point c, double r, int n) : RoundShape(2, std::move(c), r), n_(n) {}
  std::string kind() const override { return "circle"; }
  double measure() const override { return 2.0 * std::numbers::pi * r_; }
  std::vector<SurfaceNode> nodes() const override {
    std::vector<SurfaceNode> out;
    const Rule1D th = periodic_trapezoid(n_, 0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < th.size(); ++k) {
      const double t = th.x[k];
      SurfaceNode s;
      s.normal[0] = make_point({std::cos(t), std::sin(t)});
      s.x = c_ + r_ * s.normal[0];
      s.w = r_ * th.w[k];
      s.n_tangent = 1;
      s.tangent[0] = make_point({-std::sin(t), std::cos(t)});
      s.n_normal = 1;
      s.kappa[0] = 1.0 / r_;
      out.push_back(s);
    }
    return out;
  }
  InterfacePtr refined(int factor) const override {
    return std::make_shared<Circle>(c_, r_, n_ * factor);
  }

 private:
  int n_;
};

class Sphere final : public RoundShape {
 public:
  Sphere(Point c, double r, int nt, int np) : RoundShape(3, std::move(c), r), nt_(nt), np_(np) {}
  std::string kind() const override { return "sphere"; }
  double measure() const override { return 4.0 * std::numbers::pi * r_ * r_; }
  std::vector<SurfaceNode> nodes() const override {
    std::vector<SurfaceNode> out;
    const Rule1D u = gauss_legendre(nt_, -1.0, 1.0);
    const Rule1D ph = periodic_trapezoid(np_, 0.0, 2.0 * std::numbers::pi);
    out.reserve(u.size() * ph.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double ct = u.x[i], st = std::sqrt(1.0 - ct * ct);
      for (std::size_t j = 0; j < ph.size(); ++j) {
        const double cp = std::cos(ph.x[j]), sp = std::sin(ph.x[j]);
        SurfaceNode s;
        s.normal[0] = make_point({st * cp, st * sp, ct});
        s.x = c_ + r_ * s.normal[0];
        s.w = r_ * r_ * u.w[i] * ph.w[j];
        s.n_tangent = 2;
        s.tangent[0] = make_point({ct * cp, ct * sp, -st});
        s.tangent[1] = make_point({-sp, cp, 0.0});
        s.n_normal = 1;
        s.kappa = {1.0 / r_, 1.0 / r_};
        out.push_back(s);
      }
    }
    return out;
  }
  InterfacePtr refined(int factor) const override {
    return std::make_shared<Sphere>(c_, r_, nt_ * factor, np_ * factor);
  }

 private:
  int nt_, np_;
};

class StraightFilament final : public Interface {
 public:
  StraightFilament(Point o, int axis, double length, bool periodic, int n)
      : Interface(3, 2), o_(std::move(o)), axis_(axis), len_(length), periodic_(periodic), n_(n) {}
  std::string kind() const override { return "straight_filament"; }
  bool closed() const override { return periodic_; }
  double measure() const override { return len_; }
  double focal_distance() const override { return kInf; }
  std::vector<SurfaceNode> nodes() const override {
    Rule1D r;
    const double a = o_[axis_], b = o_[axis_] + len_;
    if (periodic_) {
      r = periodic_trapezoid(n_, a, b);
    } else {
      const int panels = std::max(1, n_ / 8);
      std::vector<double> br;
      for (int k = 0; k <= panels; ++k) br.push_back(a + (b - a) * k / panels);
      r = composite_gauss(br, 8);
    }
    std::vector<SurfaceNode> out;
    for (std::size_t k = 0; k < r.size(); ++k) {
      SurfaceNode s;
      s.x = o_;
      s.x[axis_] = r.x[k];
      s.w = r.w[k];
      s.n_tangent = 1;
      s.tangent[0] = unit(3, axis_);
      s.n_normal = 2;
      s.normal[0] = unit(3, (axis_ + 1) % 3);
      s.normal[1] = unit(3, (axis_ + 2) % 3);
      out.push_back(s);
    }
    return out;
  }
  InterfacePtr refined(int factor) const override {
    return std::make_shared<StraightFilament>(o_, axis_, len_, periodic_, n_ * factor);
  }
  void transverse(std::span<const Jet> x, Jet& X, Jet& Y) const override {
    const int p = (axis_ + 1) % 3, q = (axis_ + 2) % 3;
    X = x[p] - o_[p];
    Y = x[q] - o_[q];
  }
  double tube_factor(double, double) const override { return 1.0; }

 private:
  Point o_;
  int axis_;
  double len_;
  bool periodic_;
  int n_;
};

class CircularFilament final : public Interface {
 public:
  CircularFilament(Point c, double r, int n) : Interface(3, 2), c_(std::move(c)), r_(r), n_(n) {}
  std::string kind() const override { return "circular_filament"; }
  bool closed() const override { return true; }
  double measure() const override { return 2.0 * std::numbers::pi * r_; }
  double focal_distance() const override { return r_; }
  std::vector<SurfaceNode> nodes() const override {
    std::vector<SurfaceNode> out;
    const Rule1D ph = periodic_trapezoid(n_, 0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < ph.size(); ++k) {
      const double cp = std::cos(ph.x[k]), sp = std::sin(ph.x[k]);
      SurfaceNode s;
      s.normal[0] = make_point({cp, sp, 0.0});
      s.normal[1] = make_point({0.0, 0.0, 1.0});
      s.x = c_ + r_ * s.normal[0];
      s.w = r_ * ph.w[k];
      s.n_tangent = 1;
      s.tangent[0] = make_point({-sp, cp, 0.0});
      s.n_normal = 2;
      out.push_back(s);
    }
    return out;
  }
  InterfacePtr refined(int factor) const override {
    return std::make_shared<CircularFilament>(c_, r_, n_ * factor);
  }
  void transverse(std::span<const Jet> x, Jet& X, Jet& Y) const override {
    X = sqrt(square(x[0] - c_[0]) + square(x[1] - c_[1])) - r_;
    Y = x[2] - c_[2];
  }
  double tube_factor(double X, double) const override { return 1.0 + X / r_; }

 private:
  Point c_;
  double r_;
  int n_;
};

}  // namespace

Jet Interface::signed_distance(std::span<const Jet>) const { unsupported("signed distance", kind()); }
void Interface::closest_point(std::span<const Jet>, std::span<Jet>) const {
  unsupported("closest point", kind());
}
void Interface::normal(std::span<const Jet>, std::span<Jet>) const { unsupported("normal", kind()); }
Jet Interface::quadratic_level(std::span<const Jet>) const { unsupported("level function", kind()); }
void Interface::transverse(std::span<const Jet>, Jet&, Jet&) const {
  unsupported("transverse coordinates", kind());
}
double Interface::tube_factor(double, double) const { unsupported("filament tube", kind()); }

InterfacePtr make_flat_patch(const FlatPatchSpec& spec) { return std::make_shared<FlatPatch>(spec); }

InterfacePtr make_circle(const Point& center, double radius, int n) {
  return std::make_shared<Circle>(center, radius, n);
}

InterfacePtr make_sphere(const Point& center, double radius, int n_theta, int n_phi) {
  return std::make_shared<Sphere>(center, radius, n_theta, n_phi);
}

InterfacePtr make_straight_filament(const Point& origin, int axis, double length, bool periodic, int n) {
  return std::make_shared<StraightFilament>(origin, axis, length, periodic, n);
}

InterfacePtr make_circular_filament(const Point& center, double radius, int n) {
  return std::make_shared<CircularFilament>(center, radius, n);
}

std::optional<std::pair<Point, double>> round_parameters(const Interface& g) {
  if (const auto* r = dynamic_cast<const RoundShape*>(&g)) return std::make_pair(r->center(), r->radius());
  return std::nullopt;
}

double surface_integral(const Interface& g, const std::function<double(const SurfaceNode&)>& f) {
  const auto nodes = g.nodes();
  std::vector<double> v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) v[k] = nodes[k].w * f(nodes[k]);
  return pairwise_sum(v);
}

double surface_integral(const Interface& g, const Field& f) {
  return surface_integral(g, [&](const SurfaceNode& n) { return f.value(n.x); });
}

namespace {

double dot(const Point& a, const Point& b) { return a.dot(b); }

}  // namespace

SveTerms area_second_inner_variation_terms(const Interface& g, const Field& eta, const Field& zeta) {
  const auto nodes = g.nodes();
  const std::size_t m = nodes.size();
  std::vector<double> t0(m), t1(m), t2(m), t3(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& s = nodes[k];
    const SmallMat j = eta.jacobian(s.x);
    const SmallMat kz = zeta.jacobian(s.x);
    double div_z = 0.0, div_e = 0.0, normal_part = 0.0, cross = 0.0;
    for (int a = 0; a < s.n_tangent; ++a) {
      const Point ja = j * s.tangent[a];
      div_z += dot(s.tangent[a], kz * s.tangent[a]);
      div_e += dot(s.tangent[a], ja);
      for (int b = 0; b < s.n_normal; ++b) normal_part += std::pow(dot(s.normal[b], ja), 2);
      for (int b = 0; b < s.n_tangent; ++b)
        cross += dot(s.tangent[a], j * s.tangent[b]) * dot(s.tangent[b], ja);
    }
    t0[k] = s.w * div_z;
    t1[k] = s.w * div_e * div_e;
    t2[k] = s.w * normal_part;
    t3[k] = s.w * cross;
  }
  return SveTerms{pairwise_sum(t0), pairwise_sum(t1), pairwise_sum(t2), pairwise_sum(t3)};
}

double area_second_inner_variation(const Interface& g, const Field& eta, const Field& zeta) {
  return area_second_inner_variation_terms(g, eta, zeta).total();
}

double pushforward_area(const Interface& g, const Field& eta, const Field& zeta, double t) {
  const int n = g.ambient_dim();
  return surface_integral(g, [&](const SurfaceNode& s) {
    const SmallMat d =
        SmallMat::Identity(n, n) + t * eta.jacobian(s.x) + 0.5 * t * t * zeta.jacobian(s.x);
    SmallMat v(n, s.n_tangent);
    for (int a = 0; a < s.n_tangent; ++a) v.col(a) = d * s.tangent[a];
    const SmallMat gram = v.transpose() * v;
    return std::sqrt(gram.determinant());
  });
}

double ac_discrepancy(const Interface& g, const Field& eta) {
  if (g.codim() != 1) unsupported("the phase-field discrepancy", g.kind());
  return surface_integral(g, [&](const SurfaceNode& s) {
    const double v = dot(s.normal[0], eta.jacobian(s.x) * s.normal[0]);
    return v * v;
  });
}

std::pair<double, double> gl_discrepancy_density(const SmallMat& jac, const Point& p, const Point& q) {
  const double ap = dot(p, jac * p), aq = dot(p, jac * q);
  const double bp = dot(q, jac * p), bq = dot(q, jac * q);
  const double real = ap * ap + aq * aq + bp * bp + bq * bq - 2.0 * (ap * bq - aq * bp);
  const std::complex<double> dbar = 0.5 * std::complex<double>(ap - bq, bp + aq);
  return {real, 4.0 * std::norm(dbar)};
}

GlDiscrepancy gl_discrepancy(const Interface& g, const Field& eta) {
  if (g.codim() != 2) unsupported("the vortex discrepancy", g.kind());
  const auto nodes = g.nodes();
  std::vector<double> re(nodes.size()), db(nodes.size());
  GlDiscrepancy out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& s = nodes[k];
    const auto [r, d] = gl_discrepancy_density(eta.jacobian(s.x), s.normal[0], s.normal[1]);
    re[k] = s.w * r;
    db[k] = s.w * d;
    out.max_pointwise_gap = std::max(out.max_pointwise_gap, std::abs(r - d));
  }
  out.real_form = pairwise_sum(re);
  out.dbar_form = pairwise_sum(db);
  return out;
}

double jacobi_form(const Interface& g, const Field& xi) {
  if (g.codim() != 1) unsupported("the Jacobi form", g.kind());
  if (!g.closed())
    throw Error(ErrorCode::UnsupportedBoundary, "the Jacobi form is implemented for closed interfaces only");
  return surface_integral(g, [&](const SurfaceNode& s) {
    const auto j = xi.at(s.x, 1)[0];
    double grad_sq = 0.0;
    for (int a = 0; a < s.n_tangent; ++a) {
      double d = 0.0;
      for (int i = 0; i < g.ambient_dim(); ++i) d += j.g[i] * s.tangent[a][i];
      grad_sq += d * d;
    }
    double a2 = 0.0;
    for (int a = 0; a < s.n_tangent; ++a) a2 += s.kappa[a] * s.kappa[a];
    return grad_sq - a2 * j.v * j.v;
  });
}

double quadratic_form_limit(const Interface& g, const Field& xi) { return jacobi_form(g, xi); }

double flux(const Interface& g, const Field& eta) {
  if (g.codim() != 1) unsupported("normal flux", g.kind());
  return surface_integral(g, [&](const SurfaceNode& s) { return dot(eta.values(s.x), s.normal[0]); });
}

namespace {

class NormalExtension final : public FieldImpl {
 public:
  NormalExtension(InterfacePtr g, Field xi, double width)
      : FieldImpl(g->ambient_dim(), g->ambient_dim()), g_(std::move(g)), xi_(std::move(xi)), w_(width) {
    if (auto round = round_parameters(*g_)) {
      const double r = round->second + w_;
      set_support(Box{round->first.array() - r, round->first.array() + r});
    }
  }
  void apply(std::span<const Jet> x, std::span<Jet> out) const override {
    const int n = dim();
    const Jet d = g_->signed_distance(x);
    const double ad = std::abs(d.v);
    if (ad >= w_) {
      for (int i = 0; i < n; ++i) out[i] = Jet::constant(x[0].dim, d.order, 0.0);
      return;
    }
    const Jet chi = 1.0 - smooth_step(((d.v < 0 ? -d : d) - 0.5 * w_) / (0.5 * w_));
    std::array<Jet, kMaxDim> pi, nu;
    g_->closest_point(x, std::span<Jet>(pi.data(), n));
    g_->normal(x, std::span<Jet>(nu.data(), n));
    JetArray xv;
    xi_.apply(std::span<const Jet>(pi.data(), n), std::span<Jet>(xv.data(), 1));
    const Jet s = xv[0] * chi;
    for (int i = 0; i < n; ++i) out[i] = nu[i] * s;
  }

 private:
  InterfacePtr g_;
  Field xi_;
  double w_;
};

class LevelField final : public FieldImpl {
 public:
  LevelField(InterfacePtr g, bool quadratic)
      : FieldImpl(g->ambient_dim(), 1), g_(std::move(g)), quadratic_(quadratic) {}
  void apply(std::span<const Jet> x, std::span<Jet> out) const override {
    out[0] = quadratic_ ? g_->quadratic_level(x) : g_->signed_distance(x);
  }

 private:
  InterfacePtr g_;
  bool quadratic_;
};

}  // namespace

Field normal_extension(const InterfacePtr& g, const Field& xi, double width) {
  if (g->codim() != 1) unsupported("normal extension", g->kind());
  if (!g->closed())
    throw Error(ErrorCode::UnsupportedBoundary, "normal extension needs a closed interface");
  if (width > g->focal_distance())
    throw Error(ErrorCode::TubeTooNarrow, "cutoff width " + std::to_string(width) +
                                              " exceeds the focal distance " +
                                              std::to_string(g->focal_distance()));
  return Field(std::make_shared<NormalExtension>(g, xi, width));
}

Field signed_distance_field(const InterfacePtr& g) {
  return Field(std::make_shared<LevelField>(g, false));
}

Field quadratic_level_field(const InterfacePtr& g) {
  return Field(std::make_shared<LevelField>(g, true));
}

BulkRule tube_rule(const Interface& g, const Rule1D& s_rule) {
  if (g.codim() != 1) unsupported("tube quadrature", g.kind());
  const auto nodes = g.nodes();
  BulkRule r;
  r.dim = g.ambient_dim();
  r.nodes.reserve(nodes.size() * s_rule.size());
  r.weights.reserve(nodes.size() * s_rule.size());
  for (const auto& s : nodes)
    for (std::size_t k = 0; k < s_rule.size(); ++k) {
      const double t = s_rule.x[k];
      double jac = 1.0;
      for (int a = 0; a < s.n_tangent; ++a) jac *= 1.0 + t * s.kappa[a];
      r.add(s.x + t * s.normal[0], s.w * s_rule.w[k] * jac);
    }
  return r;
}

BulkRule filament_rule(const Interface& g, const Rule1D& rho_rule, int n_theta) {
  if (g.codim() != 2) unsupported("filament quadrature", g.kind());
  const auto nodes = g.nodes();
  const Rule1D th = periodic_trapezoid(n_theta, 0.0, 2.0 * std::numbers::pi);
  BulkRule r;
  r.dim = 3;
  r.nodes.reserve(nodes.size() * rho_rule.size() * th.size());
  r.weights.reserve(nodes.size() * rho_rule.size() * th.size());
  for (const auto& s : nodes)
    for (std::size_t i = 0; i < rho_rule.size(); ++i) {
      const double rho = rho_rule.x[i];
      for (std::size_t j = 0; j < th.size(); ++j) {
        const double X = rho * std::cos(th.x[j]), Y = rho * std::sin(th.x[j]);
        r.add(s.x + X * s.normal[0] + Y * s.normal[1],
              s.w * rho * rho_rule.w[i] * th.w[j] * g.tube_factor(X, Y));
      }
    }
  return r;
}

BulkRule enclosed_rule(const Interface& g, std::span<const double> radial_breaks, int n_radial,
                       int n_theta, int n_phi) {
  const auto round = round_parameters(g);
  if (!round) unsupported("enclosed-region quadrature", g.kind());
  const auto& [c, radius] = *round;
  std::vector<double> br;
  for (double b : radial_breaks) br.push_back(b * radius);
  const Rule1D rr = composite_gauss(br, n_radial);
  BulkRule r;
  r.dim = g.ambient_dim();
  if (r.dim == 2) {
    const Rule1D th = periodic_trapezoid(n_theta, 0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < rr.size(); ++i)
      for (std::size_t j = 0; j < th.size(); ++j)
        r.add(c + rr.x[i] * make_point({std::cos(th.x[j]), std::sin(th.x[j])}),
              rr.w[i] * th.w[j] * rr.x[i]);
  } else {
    const Rule1D u = gauss_legendre(n_theta, -1.0, 1.0);
    const Rule1D ph = periodic_trapezoid(n_phi, 0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < rr.size(); ++i)
      for (std::size_t a = 0; a < u.size(); ++a) {
        const double st = std::sqrt(1.0 - u.x[a] * u.x[a]);
        for (std::size_t b = 0; b < ph.size(); ++b)
          r.add(c + rr.x[i] * make_point({st * std::cos(ph.x[b]), st * std::sin(ph.x[b]), u.x[a]}),
                rr.w[i] * rr.x[i] * rr.x[i] * u.w[a] * ph.w[b]);
      }
  }
  return r;
}

std::string nodes_csv(const Interface& g) {
  std::ostringstream os;
  os.precision(17);
  const int n = g.ambient_dim();
  for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
  os << "weight";
  for (int i = 0; i < n; ++i) os << ",n" << i + 1;
  const int nk = n - g.codim();
  if (g.codim() == 1)
    for (int a = 0; a < nk; ++a) os << ",kappa" << a + 1;
  os << "\n";
  for (const auto& s : g.nodes()) {
    for (int i = 0; i < n; ++i) os << s.x[i] << ",";
    os << s.w;
    for (int i = 0; i < n; ++i) os << "," << s.normal[0][i];
    if (g.codim() == 1)
      for (int a = 0; a < nk; ++a) os << "," << s.kappa[a];
    os << "\n";
  }
  return os.str();
}

}  // namespace innervar
