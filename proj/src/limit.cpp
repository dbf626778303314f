#include "innervar/limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "innervar/calculus.hpp"
#include "innervar/errors.hpp"

namespace innervar {

const char* extrapolation_model_name(ExtrapolationModel m) {
  return m == ExtrapolationModel::LinearInEps ? "linear-in-eps" : "linear-in-inverse-log";
}

ExtrapolationModel parse_extrapolation_model(const std::string& name) {
  if (name == "linear-in-eps") return ExtrapolationModel::LinearInEps;
  if (name == "linear-in-inverse-log") return ExtrapolationModel::LinearInInverseLog;
  throw Error(ErrorCode::ConfigError, "unknown extrapolation model '" + name + "'");
}

EpsilonSchedule EpsilonSchedule::geometric(double eps0, int n, ExtrapolationModel model) {
  EpsilonSchedule s;
  s.model = model;
  for (int k = 0; k < n; ++k) s.eps.push_back(std::ldexp(eps0, -k));
  return s;
}

void EpsilonSchedule::validate() const {
  if (eps.empty()) throw Error(ErrorCode::ConfigError, "empty eps schedule");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0) || !std::isfinite(eps[k])) throw Error(ErrorCode::ConfigError, "eps must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw Error(ErrorCode::ConfigError, "eps schedule must strictly decrease");
    if (model == ExtrapolationModel::LinearInInverseLog && !(eps[k] < 1.0))
      throw Error(ErrorCode::ConfigError, "the inverse-log model needs eps < 1");
  }
}

// ConvergenceRecord

void ConvergenceRecord::push(double e, double value, double r1, double r2) {
  eps.push_back(e);
  values.push_back(value);
  residual_1.push_back(r1);
  residual_2.push_back(r2);
}

namespace {

double model_abscissa(ExtrapolationModel m, double e) {
  return m == ExtrapolationModel::LinearInEps ? e : 1.0 / std::abs(std::log(e));
}

// least-squares line y = a + b x
std::pair<double, double> line_fit(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double b = sxx > 0 ? sxy / sxx : 0.0;
  return {my - b * mx, b};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ConvergenceRecord::fit() {
  const std::size_t n = values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (n == 0) {
    extrapolated = slope = rate = nan;
    below_noise = false;
    return;
  }
  const std::size_t w = std::min<std::size_t>(std::max(window, 1), n);
  const std::size_t first = n - w;
  if (w == 1) {
    extrapolated = values.back();
    slope = 0.0;
  } else {
    std::vector<double> x, y;
    for (std::size_t k = first; k < n; ++k) {
      x.push_back(model_abscissa(model, eps[k]));
      y.push_back(values[k]);
    }
    std::tie(extrapolated, slope) = line_fit(x, y);
  }

  // successive differences shrink like eps^rate
  double scale = 0.0;
  for (std::size_t k = first; k < n; ++k) scale = std::max(scale, std::abs(values[k]));
  const double floor = 1e-8 * (1.0 + scale);
  std::vector<double> lx, ly;
  for (std::size_t k = first; k + 1 < n; ++k) {
    const double d = values[k] - values[k + 1];
    if (std::abs(d) > floor) {
      lx.push_back(std::log(eps[k]));
      ly.push_back(std::log(std::abs(d)));
    }
  }
  below_noise = false;
  if (lx.size() >= 2) {
    rate = line_fit(lx, ly).second;
  } else {
    rate = nan;
    below_noise = w >= 2;
  }
}

double ConvergenceRecord::gap() const { return std::abs(extrapolated - target) / (1.0 + std::abs(target)); }

bool ConvergenceRecord::rate_at_least(double min_rate) const { return below_noise || rate >= min_rate; }

nlohmann::json ConvergenceRecord::summary() const {
  nlohmann::json j;
  j["label"] = label;
  j["model"] = extrapolation_model_name(model);
  j["points"] = values.size();
  j["window"] = window;
  j["target"] = target;
  j["extrapolated"] = extrapolated;
  j["slope"] = slope;
  j["rate"] = std::isnan(rate) ? nlohmann::json() : nlohmann::json(rate);
  j["below_noise"] = below_noise;
  j["gap"] = gap();
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

std::string ConvergenceRecord::csv() const {
  std::ostringstream os;
  os << "epsilon,value,target,gap,residual_1,residual_2\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double g = std::abs(values[k] - target) / (1.0 + std::abs(target));
    os << fmt(eps[k]) << ',' << fmt(values[k]) << ',' << fmt(target) << ',' << fmt(g) << ','
       << fmt(residual_1[k]) << ',' << fmt(residual_2[k]) << '\n';
  }
  return os.str();
}

// Quadrature around layers

namespace {

std::vector<double> sorted_unique(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

// distance from the interface at which the level function takes value `level`
double level_to_distance(const Interface& g, const AnsatzOptions& opt, double level) {
  if (opt.level == LevelKind::SignedDistance) return level;
  const auto round = round_parameters(g);
  if (!round) return level;
  const double r = round->second;
  const double arg = r * r + 2.0 * r * level;
  if (!(arg > 0.0)) throw Error(ErrorCode::ConfigError, "blend width too large for the quadratic level");
  return std::sqrt(arg) - r;
}

std::vector<double> graded_sigma(double end) {
  std::vector<double> s{0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0};
  for (double x = 4.0; x < end; x *= 1.35) s.push_back(x);
  return s;
}

}  // namespace

std::vector<double> transverse_breaks(const Interface& g, double eps, const ProfileTable& profile,
                                      const AnsatzOptions& options, std::span<const double> extra) {
  const double width = options.blend_width;
  double end = width / eps;
  const bool contact = std::isfinite(profile.s_star()) && profile.s_star() < 0.5 * width / eps;
  if (contact) end = profile.s_star();

  // once 1 - |q| is below 1e-13 the integrands are flat and panels grow fast
  std::vector<double> sig;
  for (double s : graded_sigma(end)) {
    if (s >= end) break;
    sig.push_back(s);
    if (s > 1.0 && 1.0 - profile.eval(s).q < 1e-13) {
      for (double x = 3.0 * s; x < end; x *= 3.0) sig.push_back(x);
      break;
    }
  }
  if (profile.s_table() < end) sig.push_back(profile.s_table());
  if (!contact) {
    const double half = 0.5 * width / eps;
    for (int k = 0; k < 4; ++k) sig.push_back(half + k * (end - half) / 4.0);
  }
  sig.push_back(end);
  sig = sorted_unique(sig, 1e-9);

  std::vector<double> br;
  for (double s : sig) {
    br.push_back(level_to_distance(g, options, eps * s));
    if (s > 0) br.push_back(level_to_distance(g, options, -eps * s));
  }
  const double lo = *std::min_element(br.begin(), br.end());
  const double hi = *std::max_element(br.begin(), br.end());
  for (double e : extra)
    if (e > lo && e < hi) br.push_back(e);
  return sorted_unique(br, 1e-12 * (hi - lo));
}

Rule1D transverse_rule(const Interface& g, double eps, const ProfileTable& profile, const AnsatzOptions& options,
                       int order, std::span<const double> extra) {
  return composite_gauss(transverse_breaks(g, eps, profile, options, extra), order);
}

Rule1D vortex_radial_rule(double eps, double radius, int order, std::span<const double> extra) {
  std::vector<double> br{0.0};
  for (double s : graded_sigma(radius / eps))
    if (s > 0 && eps * s < radius) br.push_back(eps * s);
  for (double e : extra)
    if (e > 0 && e < radius) br.push_back(e);
  br.push_back(radius);
  br = sorted_unique(br, 1e-12 * radius);
  return composite_gauss(br, order);
}

// Allen-Cahn sweeps

namespace {

void require_hypersurface(const AcSetup& s) {
  if (!s.shape) throw Error(ErrorCode::ConfigError, "missing interface");
  if (s.shape->codim() != 1) throw Error(ErrorCode::ConfigError, "phase-field sweeps need a hypersurface");
  if (!(s.p > 1.0)) throw Error(ErrorCode::ConfigError, "p must exceed 1");
  if (!(s.stretch > 0.0)) throw Error(ErrorCode::ConfigError, "stretch must be positive");
  s.schedule.validate();
}

struct AcPoint {
  Field u;
  BulkRule rule;
};

AcPoint ac_point(const AcSetup& s, const std::shared_ptr<const ProfileTable>& prof, double eps) {
  const double e = eps / s.stretch;
  Field u = ansatz_field(s.shape, e, prof, s.ansatz);
  return {u, tube_rule(*s.shape, transverse_rule(*s.shape, e, *prof, s.ansatz, s.transverse_order, s.extra_breaks))};
}

// Admissibility of the whole schedule before any work is done.
void check_schedule_fits(const AcSetup& s, const std::shared_ptr<const ProfileTable>& prof) {
  try {
    ansatz_field(s.shape, s.schedule.eps.front() / s.stretch, prof, s.ansatz);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EpsilonTooLarge)
      throw Error(ErrorCode::ConfigError, std::string("eps schedule does not fit the tube: ") + e.what());
    throw;
  }
}

double grad_norm(const Jet& j, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += j.g[i] * j.g[i];
  return std::sqrt(s);
}

}  // namespace

ConvergenceRecord ac_limit_experiment(const AcSetup& s, const Field& eta, const Field& zeta) {
  require_hypersurface(s);
  const auto prof = std::make_shared<const ProfileTable>(s.p);
  check_schedule_fits(s, prof);
  const double cp = c_p(s.p);
  const SveTerms sve = area_second_inner_variation_terms(*s.shape, eta, zeta);
  const double disc = ac_discrepancy(*s.shape, eta);
  const double area = s.shape->measure();

  ConvergenceRecord rec;
  rec.label = "ac-limit";
  rec.model = s.schedule.model;
  rec.target = cp * (sve.total() + (s.p - 1.0) * disc);
  rec.extra = {{"c_p", cp},
               {"p", s.p},
               {"area_second_variation", sve.total()},
               {"discrepancy", disc},
               {"measure", area}};
  nlohmann::json pts = nlohmann::json::array();
  for (double eps : s.schedule.eps) {
    const AcPoint pt = ac_point(s, prof, eps);
    const auto f = integrands::p_allen_cahn(eps, s.p);
    const SecondInnerTerms t = second_inner_variation_terms(*f, pt.u, eta, zeta, pt.rule);
    const double e = energy(*f, pt.u, pt.rule);
    double oracle_gap = 0.0;
    if (s.oracle) oracle_gap = std::abs(t.total() - inner_variation_oracle(*f, pt.u, eta, zeta, pt.rule).second);
    rec.push(eps, t.total(), e - cp * area, oracle_gap);
    pts.push_back({{"fx", t.fx},
                   {"div_coupling", t.div_coupling},
                   {"y_term", t.y_term},
                   {"hessian", t.hessian},
                   {"tensor", t.tensor},
                   {"nodes", pt.rule.size()}});
  }
  rec.extra["terms"] = pts;
  rec.fit();
  return rec;
}

ConvergenceRecord equipartition_residuals(const AcSetup& s) {
  require_hypersurface(s);
  const auto prof = std::make_shared<const ProfileTable>(s.p);
  check_schedule_fits(s, prof);
  const double p = s.p;
  const int n = s.shape->ambient_dim();

  ConvergenceRecord rec;
  rec.label = "equipartition";
  rec.model = s.schedule.model;
  rec.target = 0.0;
  rec.extra = {{"p", p}, {"stretch", s.stretch}};
  for (double eps : s.schedule.eps) {
    const AcPoint pt = ac_point(s, prof, eps);
    const double scale = std::pow(eps, p - 1.0);
    const auto r = integrate_many(pt.rule, 2, [&](const Point& x, std::span<double> out) {
      const JetArray j = pt.u.at(x, 1);
      const double z = j[0].v;
      const double g = grad_norm(j[0], n);
      const double w = double_well(z);
      const double a = scale * std::pow(g, p);
      out[0] = std::abs(a - w / eps);
      out[1] = std::abs(a - std::pow(w, (p - 1.0) / p) * g);
    });
    rec.push(eps, r[0], r[1], 0.0);
  }
  rec.fit();
  return rec;
}

ConvergenceRecord tensor_pairing_experiment(const AcSetup& s, const Field& phi, const std::vector<int>& indices) {
  require_hypersurface(s);
  const int n = s.shape->ambient_dim();
  if (indices.size() != 2 && indices.size() != 4)
    throw Error(ErrorCode::ConfigError, "tensor pairings take two or four indices");
  for (int i : indices)
    if (i < 0 || i >= n) throw Error(ErrorCode::ConfigError, "tensor index out of range");
  if (phi.components() != 1 || phi.dim() != n) throw Error(ErrorCode::DimensionMismatch, "test function must be scalar");
  const auto prof = std::make_shared<const ProfileTable>(s.p);
  check_schedule_fits(s, prof);
  const double p = s.p;
  const double cp = c_p(p);

  std::vector<std::vector<int>> perms;
  std::vector<int> idx = indices;
  std::sort(idx.begin(), idx.end());
  do perms.push_back(idx);
  while (std::next_permutation(idx.begin(), idx.end()));
  perms.insert(perms.begin(), indices);

  ConvergenceRecord rec;
  rec.label = "tensor-pairing";
  rec.model = s.schedule.model;
  rec.target = cp * surface_integral(*s.shape, [&](const SurfaceNode& nd) {
    double v = phi.value(nd.x);
    for (int i : indices) v *= nd.normal[0][i];
    return v;
  });
  rec.extra = {{"c_p", cp}, {"p", p}, {"indices", indices}};
  const int k = static_cast<int>(perms.size());
  for (double eps : s.schedule.eps) {
    const AcPoint pt = ac_point(s, prof, eps);
    const double scale = std::pow(eps, p - 1.0);
    const auto r = integrate_many(pt.rule, k, [&](const Point& x, std::span<double> out) {
      const JetArray j = pt.u.at(x, 1);
      const double g = grad_norm(j[0], n);
      if (g == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      const double base = scale * std::pow(g, p) * phi.value(x);
      for (int m = 0; m < k; ++m) {
        double v = base;
        for (int i : perms[m]) v *= j[0].g[i] / g;
        out[m] = v;
      }
    });
    double sym = 0.0;
    for (int m = 1; m < k; ++m) sym = std::max(sym, std::abs(r[m] - r[0]));
    rec.push(eps, r[0], sym, 0.0);
  }
  rec.fit();
  return rec;
}

// Ginzburg-Landau sweep

GlResult gl_limit_experiment(const GlSetup& s, const Field& eta, const Field& zeta) {
  if (!s.filament || s.filament->codim() != 2) throw Error(ErrorCode::ConfigError, "vortex sweeps need a filament");
  s.schedule.validate();
  const auto prof = std::make_shared<const GlProfile>(s.surrogate);
  try {
    gl_vortex_field(s.filament, s.schedule.eps.front(), prof, s.radius);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EpsilonTooLarge)
      throw Error(ErrorCode::ConfigError, std::string("eps schedule does not fit the cylinder: ") + e.what());
    throw;
  }
  const double pi = std::numbers::pi;
  const double length = s.filament->measure();
  const SveTerms sve = area_second_inner_variation_terms(*s.filament, eta, zeta);
  const GlDiscrepancy disc = gl_discrepancy(*s.filament, eta);

  GlResult out;
  out.variation.label = "gl-second-inner-variation";
  out.variation.model = s.schedule.model;
  out.variation.target = pi * (sve.total() + disc.real_form);
  out.variation.extra = {{"area_second_variation", sve.total()},
                         {"discrepancy_real", disc.real_form},
                         {"discrepancy_dbar", disc.dbar_form},
                         {"discrepancy_pointwise_gap", disc.max_pointwise_gap},
                         {"length", length}};
  out.energy.label = "gl-energy";
  out.energy.model = s.schedule.model;
  out.energy.target = pi * length;
  for (double eps : s.schedule.eps) {
    const Field u = gl_vortex_field(s.filament, eps, prof, s.radius);
    const BulkRule rule = filament_rule(*s.filament, vortex_radial_rule(eps, s.radius, s.rho_order, s.extra_breaks),
                                        s.n_theta);
    const auto f = integrands::ginzburg_landau(eps);
    const double v = second_inner_variation(*f, u, eta, zeta, rule);
    const double e = energy(*f, u, rule);
    const double d1 = first_inner_variation(*f, u, eta, rule);
    double oracle_gap = 0.0;
    if (s.oracle) oracle_gap = std::abs(v - inner_variation_oracle(*f, u, eta, zeta, rule).second);
    out.variation.push(eps, v, d1, oracle_gap);
    out.energy.push(eps, e, e - pi * length, 0.0);
  }
  out.variation.fit();
  out.energy.fit();
  return out;
}

// Volume constraint

VolumeCheck volume_admissibility(const InterfacePtr& g, const Field& eta, const Field& zeta,
                                 const VolumeResolution& res) {
  const int n = g->ambient_dim();
  if (eta.dim() != n || eta.components() != n || zeta.dim() != n || zeta.components() != n)
    throw Error(ErrorCode::DimensionMismatch, "volume check needs vector fields on the ambient space");
  const BulkRule rule = enclosed_rule(*g, res.radial_breaks, res.n_radial, res.n_theta, res.n_phi);
  const auto r = integrate_many(rule, 2, [&](const Point& x, std::span<double> out) {
    const JetArray je = eta.at(x, 1);
    const JetArray jz = zeta.at(x, 1);
    double div = 0, divz = 0, trj2 = 0;
    for (int i = 0; i < n; ++i) {
      div += je[i].g[i];
      divz += jz[i].g[i];
      for (int k = 0; k < n; ++k) trj2 += je[i].g[k] * je[k].g[i];
    }
    out[0] = div;
    out[1] = divz + div * div - trj2;
  });
  return {r[0], r[1], flux(*g, eta)};
}

PoincareCheck constrained_poincare_check(const InterfacePtr& g, const Field& xi, double width) {
  PoincareCheck c;
  c.mean = surface_integral(*g, xi);
  if (std::abs(c.mean) > 1e-10) throw Error(ErrorCode::ConfigError, "xi must have zero mean on the interface");
  const Field v = normal_extension(g, xi, width);
  c.lhs = area_second_inner_variation(*g, v, zeta_eta(v));
  c.rhs = jacobi_form(*g, xi);
  c.norm_sq = surface_integral(*g, [&](const SurfaceNode& nd) {
    const double x = xi.value(nd.x);
    return x * x;
  });
  return c;
}

// Perturbation onto the constraint

PerturbedField perturbed_field(const Field& u, const Field& eta, const Field& phi, const BulkRule& tube,
                               const BulkRule& region) {
  const int n = u.dim();
  const auto r = integrate_many(tube, 2, [&](const Point& x, std::span<double> out) {
    const JetArray j = u.at(x, 1);
    const Point e = eta.values(x), f = phi.values(x);
    double a = 0, b = 0;
    for (int i = 0; i < n; ++i) {
      a += j[0].g[i] * e[i];
      b += j[0].g[i] * f[i];
    }
    out[0] = a;
    out[1] = b;
  });
  PerturbedField pf;
  pf.numerator = r[0];
  pf.denominator = -r[1];
  if (std::abs(pf.denominator) < 1e-8)
    throw Error(ErrorCode::DegenerateReference, "int u div phi vanishes; choose a reference field with flux");
  pf.h = pf.numerator / pf.denominator;
  pf.eta_eps = fields::sum(eta, fields::scaled(phi, pf.h));
  pf.constraint = integrate(region, [&](const Point& x) { return u.value(x) * divergence(pf.eta_eps, x); });
  return pf;
}

ConvergenceRecord perturbation_experiment(const AcSetup& s, const Field& eta, const Field& phi, double region_radius) {
  require_hypersurface(s);
  const auto round = round_parameters(*s.shape);
  if (!round) throw Error(ErrorCode::ConfigError, "the perturbation sweep needs a circle or sphere");
  const auto& [c, radius] = *round;
  if (!(region_radius > radius + s.ansatz.blend_width))
    throw Error(ErrorCode::ConfigError, "region must contain the blend band");
  const double fl = flux(*s.shape, phi);
  if (std::abs(fl) < 1e-6) throw Error(ErrorCode::DegenerateReference, "reference field has no flux through the interface");
  const auto prof = std::make_shared<const ProfileTable>(s.p);
  check_schedule_fits(s, prof);
  const int n = s.shape->ambient_dim();
  const InterfacePtr region = n == 2 ? make_circle(c, region_radius, 64) : make_sphere(c, region_radius, 12, 24);

  ConvergenceRecord rec;
  rec.label = "perturbation";
  rec.model = s.schedule.model;
  rec.target = 0.0;
  rec.extra = {{"reference_flux", fl}, {"eta_flux", flux(*s.shape, eta)}};
  for (double eps : s.schedule.eps) {
    const AcPoint pt = ac_point(s, prof, eps);
    // radial panels of the enclosed region follow the tube breakpoints
    std::vector<double> cuts;
    for (int k = 0; k <= 40; ++k) cuts.push_back(k / 40.0);
    for (double e : transverse_breaks(*s.shape, eps / s.stretch, *prof, s.ansatz, s.extra_breaks))
      cuts.push_back((radius + e) / region_radius);
    for (double e : s.extra_breaks)
      if (radius + e > 0 && radius + e < region_radius) cuts.push_back((radius + e) / region_radius);
    cuts = sorted_unique(cuts, 1e-12);
    const BulkRule reg = enclosed_rule(*region, cuts, std::max(12, s.transverse_order), n == 2 ? 48 : 12, 24);
    const PerturbedField pf = perturbed_field(pt.u, eta, phi, pt.rule, reg);
    rec.push(eps, pf.h, pf.constraint, pf.denominator);
  }
  rec.fit();
  return rec;
}

// Quadratic forms

ConvergenceRecord quadratic_forms_experiment(const AcSetup& s, const Field& xi, double width) {
  require_hypersurface(s);
  if (s.p != 2.0) throw Error(ErrorCode::ConfigError, "quadratic forms are defined for p = 2");
  const auto prof = std::make_shared<const ProfileTable>(2.0);
  check_schedule_fits(s, prof);
  const Field v = normal_extension(s.shape, xi, width);
  const Field zv = zeta_eta(v);
  const double c2 = c_p(2.0);

  ConvergenceRecord rec;
  rec.label = "quadratic-forms";
  rec.model = s.schedule.model;
  const double q = quadratic_form_limit(*s.shape, xi);
  rec.target = c2 * q;
  rec.extra = {{"limit_form", q}, {"c_2", c2}};
  for (double eps : s.schedule.eps) {
    const AcPoint pt = ac_point(s, prof, eps);
    const auto f = integrands::p_allen_cahn(eps, 2.0);
    const double raw = second_variation(*f, pt.u, minus_grad_dot(pt.u, v), pt.rule);
    const double lag = first_variation(*f, pt.u, x0_field(pt.u, v, zv), pt.rule);
    rec.push(eps, raw + lag, raw, lag);
  }
  rec.fit();
  return rec;
}

}  // namespace innervar
