#include "innervar/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "innervar/errors.hpp"
#include "innervar/quadrature.hpp"
#include "ode.hpp"

namespace innervar {

double double_well(double z) { return (1.0 - z * z) * (1.0 - z * z); }
double double_well_d1(double z) { return -4.0 * z * (1.0 - z * z); }
double double_well_d2(double z) { return 12.0 * z * z - 4.0; }

double c_p(double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::ConfigError, "c_p needs p >= 1");
  // x = tanh(pi/2 sinh t) turns 1 - x^2 into sech^2, so the integrand
  // (1 - x^2)^beta dx is evaluated without cancellation near the ends.
  const double beta = 2.0 * (p - 1.0) / p;
  const double h = 1.0 / 128.0;
  const int n = static_cast<int>(5.0 / h);
  std::vector<double> terms;
  terms.reserve(2 * n + 1);
  for (int k = -n; k <= n; ++k) {
    const double t = k * h;
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double sech = 1.0 / std::cosh(u);
    terms.push_back(h * 0.5 * std::numbers::pi * std::cosh(t) * std::pow(sech, 2.0 * beta + 2.0));
  }
  return pairwise_sum(terms);
}

namespace {

// Quintic Hermite interpolation on [a, b] from values and first two
// derivatives at both ends; returns value and three derivatives at s.
ProfileValue quintic(double a, double b, double y0, double d0, double e0, double y1, double d1,
                     double e1, double s) {
  const double h = b - a;
  const double t = (s - a) / h;
  const double c0 = y0, c1 = d0 * h, c2 = 0.5 * e0 * h * h;
  const double A = y1 - c0 - c1 - c2;
  const double B = d1 * h - c1 - 2.0 * c2;
  const double C = e1 * h * h - 2.0 * c2;
  const double c3 = 10.0 * A - 4.0 * B + 0.5 * C;
  const double c4 = -15.0 * A + 7.0 * B - C;
  const double c5 = 6.0 * A - 3.0 * B + 0.5 * C;
  ProfileValue v;
  v.q = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  v.d1 = (c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)))) / h;
  v.d2 = (2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5))) / (h * h);
  v.d3 = (6.0 * c3 + t * (24.0 * c4 + t * 60.0 * c5)) / (h * h * h);
  return v;
}

ProfileValue from_jet(const Jet& j) { return ProfileValue{j.v, j.g[0], j.h[0][0], j.t[0][0][0]}; }

}  // namespace

ProfileTable::ProfileTable(double p, bool closed_form) : p_(p), alpha_(2.0 / p), closed_(closed_form && p == 2.0) {
  if (!(p > 1.0)) throw Error(ErrorCode::ConfigError, "optimal profile needs p > 1");
  const double a = alpha_;
  auto rhs = [a](double, const std::array<double, 1>& y) {
    const double w = std::max(0.0, 1.0 - y[0] * y[0]);
    return std::array<double, 1>{std::pow(w, a)};
  };
  const double w_switch = 1e-6;
  double s = 0.0, q = 0.0;
  for (;;) {
    const double w = std::max(0.0, 1.0 - q * q);
    nodes_.push_back(s);
    q_.push_back(q);
    q1_.push_back(std::pow(w, a));
    q2_.push_back(-2.0 * a * q * std::pow(w, 2.0 * a - 1.0));
    if (w <= w_switch) break;
    const double h = 0.01 * std::max(1.0, s / 8.0);
    q = detail::dormand_prince<1>(rhs, s, s + h, {q}, 1e-15)[0];
    s += h;
    if (nodes_.size() > 2000000) throw Error(ErrorCode::StiffTail, "profile table did not reach the tail");
  }
  w_switch_ = 1.0 - q_.back() * q_.back();
  const double S = nodes_.back();
  const double ws = w_switch_;
  const double w_target = 1.0 - (1.0 - 1e-9) * (1.0 - 1e-9);
  if (std::abs(a - 1.0) < 1e-14) {
    s_star_ = std::numeric_limits<double>::infinity();
    s_max_ = S + 0.5 * std::log(ws / w_target);
  } else {
    const double e = 1.0 - a;
    s_star_ = a < 1.0 ? S + std::pow(ws, e) / (2.0 * e) : std::numeric_limits<double>::infinity();
    s_max_ = S + (std::pow(w_target, e) - std::pow(ws, e)) / (2.0 * (a - 1.0));
  }
  // 1 - q = 1e-2
  std::size_t k = 0;
  while (k + 1 < nodes_.size() && q_[k + 1] < 0.99) ++k;
  double lo = nodes_[k], hi = k + 1 < nodes_.size() ? nodes_[k + 1] : s_max_;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid).q < 0.99 ? lo : hi) = mid;
  }
  s_core_ = 0.5 * (lo + hi);
}

ProfileValue ProfileTable::tail(double s) const {
  const double S = nodes_.back();
  if (s >= s_star_) return ProfileValue{1.0, 0.0, 0.0, 0.0};
  const Jet sj = Jet::variable(1, 3, 0, s);
  Jet w;
  if (std::abs(alpha_ - 1.0) < 1e-14) {
    w = exp((sj - S) * -2.0) * w_switch_;
  } else {
    const double e = 1.0 - alpha_;
    const Jet L = (sj - S) * (2.0 * (alpha_ - 1.0)) + std::pow(w_switch_, e);
    if (L.v <= 0.0) return ProfileValue{1.0, 0.0, 0.0, 0.0};
    w = pow(L, 1.0 / e);
  }
  return from_jet(sqrt(1.0 - w));
}

ProfileValue ProfileTable::eval_positive(double s) const {
  if (s >= nodes_.back()) return tail(s);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return quintic(nodes_[k], nodes_[k + 1], q_[k], q1_[k], q2_[k], q_[k + 1], q1_[k + 1], q2_[k + 1], s);
}

ProfileValue ProfileTable::eval(double s) const {
  if (closed_) {
    const double t = std::tanh(s);
    const double c = std::cosh(s);
    const double d1 = 1.0 / (c * c);
    return {t, d1, -2.0 * t * d1, d1 * (6.0 * t * t - 2.0)};
  }
  if (s >= 0.0) return eval_positive(s);
  ProfileValue v = eval_positive(-s);
  v.q = -v.q;
  v.d2 = -v.d2;
  return v;
}

std::string ProfileTable::csv(double s_lo, double s_hi, double step) const {
  std::ostringstream os;
  os.precision(17);
  os << "s,q,dq\n";
  const long n = std::lround((s_hi - s_lo) / step);
  for (long i = 0; i <= n; ++i) {
    const double s = s_lo + i * step;
    const auto v = eval(s);
    os << s << "," << v.q << "," << v.d1 << "\n";
  }
  return os.str();
}

GlProfile::GlProfile(bool surrogate) : surrogate_(surrogate) {
  if (surrogate_) {
    a_ = 1.0 / std::sqrt(2.0);
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval(mid).q < 0.99 ? lo : hi) = mid;
    }
    r_core_ = 0.5 * (lo + hi);
    return;
  }
  // Odd power series f = sum_k c_k r^(2k+1) from the equation:
  // 4 (k+1)(k+2) c_{k+1} = -c_k + [f^3]_k.
  const int terms = 20;
  auto series_for = [terms](double a) {
    std::vector<double> c(terms, 0.0);
    c[0] = a;
    for (int k = 0; k + 1 < terms; ++k) {
      double cube = 0.0;
      for (int i = 0; i <= k - 1; ++i)
        for (int j = 0; i + j <= k - 1; ++j) cube += c[i] * c[j] * c[k - 1 - i - j];
      c[k + 1] = (-c[k] + cube) / (4.0 * (k + 1) * (k + 2));
    }
    return c;
  };
  auto series_eval = [](const std::vector<double>& c, double r) {
    ProfileValue v;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double n = 2.0 * k + 1.0;
      v.q += c[k] * std::pow(r, n);
      v.d1 += c[k] * n * std::pow(r, n - 1.0);
      if (n >= 2) v.d2 += c[k] * n * (n - 1.0) * std::pow(r, n - 2.0);
      if (n >= 3) v.d3 += c[k] * n * (n - 1.0) * (n - 2.0) * std::pow(r, n - 3.0);
    }
    return v;
  };
  auto rhs = [](double r, const std::array<double, 2>& y) {
    const double f = y[0], g = y[1];
    return std::array<double, 2>{g, -g / r + f / (r * r) - f * (1.0 - f * f)};
  };
  const double r0 = 0.5;
  // +1 when the trajectory overshoots 1, -1 when it turns back down.
  auto classify = [&](double a) {
    const auto c = series_for(a);
    const auto v = series_eval(c, r0);
    std::array<double, 2> y{v.q, v.d1};
    double r = r0;
    while (r < 16.0) {
      y = detail::dormand_prince<2>(rhs, r, r + 0.05, y, 1e-14);
      r += 0.05;
      if (y[0] > 1.0) return 1;
      if (y[1] < 0.0) return -1;
    }
    return 0;
  };
  double lo = 0.3, hi = 0.9;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int c = classify(mid);
    if (c == 0) {
      lo = hi = mid;
      break;
    }
    (c > 0 ? hi : lo) = mid;
  }
  a_ = 0.5 * (lo + hi);
  series_ = series_for(a_);
  const auto v0 = series_eval(series_, r0);
  std::array<double, 2> y{v0.q, v0.d1};
  const int n = static_cast<int>(std::lround((r_match_ - r0) / h_));
  for (int i = 0; i <= n; ++i) {
    const double r = r0 + i * h_;
    if (i > 0) y = detail::dormand_prince<2>(rhs, r - h_, r, y, 1e-14);
    f_.push_back(y[0]);
    f1_.push_back(y[1]);
    f2_.push_back(-y[1] / r + y[0] / (r * r) - y[0] * (1.0 - y[0] * y[0]));
  }
  const double R = r_match_;
  const double fr = f_.back(), fpr = f1_.back();
  const double v = 0.5 * (R * fpr - 2.0 * (1.0 - fr));
  const double u = (1.0 - fr) - v;
  tail_a_ = u * R * R;
  tail_b_ = v * R * R * R * R;
  double rl = 0.0, rh = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (rl + rh);
    (eval(mid).q < 0.99 ? rl : rh) = mid;
  }
  r_core_ = 0.5 * (rl + rh);
}

ProfileValue GlProfile::eval_table(double r) const {
  const double r0 = r_match_ - h_ * (static_cast<double>(f_.size()) - 1.0);
  std::size_t k = static_cast<std::size_t>(std::floor((r - r0) / h_));
  k = std::min(k, f_.size() - 2);
  const double a = r0 + k * h_, b = a + h_;
  return quintic(a, b, f_[k], f1_[k], f2_[k], f_[k + 1], f1_[k + 1], f2_[k + 1], r);
}

ProfileValue GlProfile::eval(double r) const {
  if (surrogate_) {
    const Jet rj = Jet::variable(1, 3, 0, r);
    return from_jet(rj * pow(square(rj) + 2.0, -0.5));
  }
  if (r < 0.5) {
    ProfileValue v;
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const double n = 2.0 * k + 1.0;
      v.q += series_[k] * std::pow(r, n);
      v.d1 += series_[k] * n * std::pow(r, n - 1.0);
      if (n >= 2) v.d2 += series_[k] * n * (n - 1.0) * std::pow(r, n - 2.0);
      if (n >= 3) v.d3 += series_[k] * n * (n - 1.0) * (n - 2.0) * std::pow(r, n - 3.0);
    }
    return v;
  }
  if (r <= r_match_) return eval_table(r);
  const Jet rj = Jet::variable(1, 3, 0, r);
  const Jet inv2 = reciprocal(square(rj));
  return from_jet(1.0 - inv2 * tail_a_ - square(inv2) * tail_b_);
}

ProfileValue GlProfile::ratio(double s) const {
  if (surrogate_) {
    const Jet sj = Jet::variable(1, 3, 0, s);
    return from_jet(pow(sj + 2.0, -0.5));
  }
  const double r = std::sqrt(s);
  if (r < 0.5) {
    // H(s) = sum_k c_k s^k
    ProfileValue v;
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const double n = static_cast<double>(k);
      v.q += series_[k] * std::pow(s, n);
      if (k >= 1) v.d1 += series_[k] * n * std::pow(s, n - 1.0);
      if (k >= 2) v.d2 += series_[k] * n * (n - 1.0) * std::pow(s, n - 2.0);
      if (k >= 3) v.d3 += series_[k] * n * (n - 1.0) * (n - 2.0) * std::pow(s, n - 3.0);
    }
    return v;
  }
  const ProfileValue f = eval(r);
  const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
  const double phi = f.q / r;
  const double phi1 = f.d1 / r - f.q / r2;
  const double phi2 = f.d2 / r - 2.0 * f.d1 / r2 + 2.0 * f.q / r3;
  const double phi3 = f.d3 / r - 3.0 * f.d2 / r2 + 6.0 * f.d1 / r3 - 6.0 * f.q / r4;
  ProfileValue h;
  h.q = phi;
  h.d1 = phi1 / (2.0 * r);
  h.d2 = (phi2 * r - phi1) / (4.0 * r3);
  h.d3 = (phi3 * r2 - 3.0 * phi2 * r + 3.0 * phi1) / (8.0 * r4 * r);
  return h;
}

namespace {

class AcAnsatz final : public FieldImpl {
 public:
  AcAnsatz(InterfacePtr g, double eps, std::shared_ptr<const ProfileTable> prof, AnsatzOptions opt)
      : FieldImpl(g->ambient_dim(), 1), g_(std::move(g)), eps_(eps), prof_(std::move(prof)), opt_(opt) {}

  void apply(std::span<const Jet> x, std::span<Jet> out) const override {
    const Jet g = opt_.level == LevelKind::Quadratic ? g_->quadratic_level(x) : g_->signed_distance(x);
    const double width = opt_.blend_width;
    const double sgn = g.v < 0.0 ? -1.0 : 1.0;
    const double ag = std::abs(g.v);
    if (ag >= width) {
      out[0] = Jet::constant(g.dim, g.order, sgn);
      return;
    }
    const Jet sigma = g / eps_;
    const ProfileValue v = prof_->eval(sigma.v);
    const Jet q = apply_unary(sigma, v.q, v.d1, v.d2, v.d3);
    if (ag <= 0.5 * width) {
      out[0] = q;
      return;
    }
    const Jet chi = 1.0 - smooth_step((g * sgn - 0.5 * width) / (0.5 * width));
    out[0] = sgn - (sgn - q) * chi;
  }

 private:
  InterfacePtr g_;
  double eps_;
  std::shared_ptr<const ProfileTable> prof_;
  AnsatzOptions opt_;
};

class VortexAnsatz final : public FieldImpl {
 public:
  VortexAnsatz(InterfacePtr g, double eps, std::shared_ptr<const GlProfile> prof)
      : FieldImpl(3, 2), g_(std::move(g)), eps_(eps), prof_(std::move(prof)) {}

  void apply(std::span<const Jet> x, std::span<Jet> out) const override {
    Jet X, Y;
    g_->transverse(x, X, Y);
    const Jet S = (square(X) + square(Y)) / (eps_ * eps_);
    const ProfileValue h = prof_->ratio(S.v);
    const Jet H = apply_unary(S, h.q, h.d1, h.d2, h.d3) / eps_;
    out[0] = X * H;
    out[1] = Y * H;
  }

 private:
  InterfacePtr g_;
  double eps_;
  std::shared_ptr<const GlProfile> prof_;
};

}  // namespace

Field ansatz_field(const InterfacePtr& g, double eps, std::shared_ptr<const ProfileTable> profile,
                   const AnsatzOptions& options) {
  if (g->codim() != 1) throw Error(ErrorCode::DimensionMismatch, "phase-field ansatz needs a hypersurface");
  if (!(eps > 0.0)) throw Error(ErrorCode::EpsilonTooLarge, "epsilon must be positive");
  if (eps * profile->s_core() > 0.5 * options.blend_width)
    throw Error(ErrorCode::EpsilonTooLarge,
                "epsilon " + std::to_string(eps) + " times the profile core width " +
                    std::to_string(profile->s_core()) + " exceeds half the blend width " +
                    std::to_string(options.blend_width));
  if (options.blend_width > g->focal_distance())
    throw Error(ErrorCode::TubeTooNarrow, "blend width exceeds the focal distance of the interface");
  return Field(std::make_shared<AcAnsatz>(g, eps, std::move(profile), options));
}

Field gl_vortex_field(const InterfacePtr& g, double eps, std::shared_ptr<const GlProfile> profile,
                      double tube_radius) {
  if (g->codim() != 2) throw Error(ErrorCode::DimensionMismatch, "vortex ansatz needs a filament");
  if (!(eps > 0.0) || eps * profile->r_core() > tube_radius)
    throw Error(ErrorCode::EpsilonTooLarge,
                "epsilon " + std::to_string(eps) + " times the vortex core radius " +
                    std::to_string(profile->r_core()) + " exceeds the tube radius " +
                    std::to_string(tube_radius));
  return Field(std::make_shared<VortexAnsatz>(g, eps, std::move(profile)));
}

}  // namespace innervar
