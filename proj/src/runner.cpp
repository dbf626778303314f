#include "innervar/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "innervar/calculus.hpp"
#include "innervar/config.hpp"
#include "innervar/errors.hpp"
#include "innervar/geometry.hpp"
#include "innervar/limit.hpp"
#include "innervar/profiles.hpp"
#include "innervar/quadrature.hpp"
#include "innervar/suites.hpp"
#include "innervar/variation.hpp"

namespace innervar {

using nlohmann::json;

namespace {

using namespace config;
constexpr double kPi = std::numbers::pi;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV for tables that are not eps sweeps; the first column holds the case
// parameter.
class Table {
 public:
  void add(double param, double value, double target, double r1, double r2) {
    rows_.push_back({param, value, target, std::abs(value - target) / (1.0 + std::abs(target)), r1, r2});
  }
  std::string csv() const {
    std::ostringstream os;
    os << "epsilon,value,target,gap,residual_1,residual_2\n";
    for (const auto& r : rows_)
      os << fmt(r[0]) << ',' << fmt(r[1]) << ',' << fmt(r[2]) << ',' << fmt(r[3]) << ',' << fmt(r[4]) << ','
         << fmt(r[5]) << '\n';
    return os.str();
  }

 private:
  std::vector<std::array<double, 6>> rows_;
};

void at_most(CaseResult& r, const std::string& name, double value, double limit) {
  r.checks.push_back({name, value, limit, false, value <= limit});
}

void at_least(CaseResult& r, const std::string& name, double value, double limit) {
  r.checks.push_back({name, value, limit, true, value >= limit});
}

void rate_check(CaseResult& r, const ConvergenceRecord& rec, double min_rate) {
  r.checks.push_back({"rate", rec.rate, min_rate, true, rec.rate_at_least(min_rate)});
}

void take_record(CaseResult& r, const ConvergenceRecord& rec) {
  r.csv = rec.csv();
  r.record = rec.summary();
}

// Tolerances with per-kind defaults; unknown names are rejected.
class Tolerances {
 public:
  Tolerances(const json& c, const std::string& where, std::vector<std::pair<std::string, double>> defaults)
      : where_(where + ".tolerances") {
    std::vector<std::string> keys;
    for (const auto& [k, v] : defaults) {
      keys.push_back(k);
      values_[k] = v;
    }
    if (!c.contains("tolerances")) return;
    const json& t = c.at("tolerances");
    check_keys(t, where_, keys);
    for (const auto& [k, v] : t.items()) {
      if (!v.is_number() && !v.is_null()) throw Error(ErrorCode::ConfigError, where_ + ": '" + k + "' must be a number");
      values_[k] = v.is_null() ? std::nan("") : v.get<double>();
    }
  }
  double operator[](const std::string& k) const { return values_.at(k); }
  bool has(const std::string& k) const { return std::isfinite(values_.at(k)); }

 private:
  std::string where_;
  std::map<std::string, double> values_;
};

struct Plan {
  std::vector<std::string> outputs;
  std::function<std::vector<CaseResult>()> run;
};

struct Context {
  std::uint64_t seed = 0;
  int index = 0;
  std::string name;
  std::string where;
};

SeededRng case_rng(const Context& ctx) {
  return SeededRng(ctx.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(ctx.index + 1)));
}

std::vector<std::string> with_common(std::initializer_list<std::string> keys) {
  std::vector<std::string> v{"name", "tolerances"};
  v.insert(v.end(), keys.begin(), keys.end());
  return v;
}

EpsilonSchedule parse_schedule(const json& c, const std::string& where, ExtrapolationModel model) {
  if (!c.contains("schedule")) throw Error(ErrorCode::ConfigError, where + ": missing key 'schedule'");
  const json& s = c.at("schedule");
  const std::string w = where + ".schedule";
  check_keys(s, w, {"eps", "eps0", "points", "model"});
  if (s.contains("model")) {
    try {
      model = parse_extrapolation_model(text(s, "model", w));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, w + ": " + e.what());
    }
  }
  EpsilonSchedule out;
  if (s.contains("eps")) {
    if (s.contains("eps0") || s.contains("points")) throw Error(ErrorCode::ConfigError, w + ": give 'eps' or 'eps0'/'points'");
    out.eps = numbers(s, "eps", w);
    out.model = model;
  } else {
    const int n = integer(s, "points", w, 6);
    if (n < 1) throw Error(ErrorCode::ConfigError, w + ": 'points' must be positive");
    out = EpsilonSchedule::geometric(number(s, "eps0", w, 0.1), n, model);
  }
  try {
    out.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, w + ": " + e.what());
  }
  return out;
}

AnsatzOptions parse_ansatz(const json& c, const std::string& where) {
  AnsatzOptions a;
  if (!c.contains("ansatz")) return a;
  const json& j = c.at("ansatz");
  const std::string w = where + ".ansatz";
  check_keys(j, w, {"level", "blend_width"});
  const std::string level = text(j, "level", w, "signed-distance");
  if (level == "signed-distance")
    a.level = LevelKind::SignedDistance;
  else if (level == "quadratic")
    a.level = LevelKind::Quadratic;
  else
    throw Error(ErrorCode::ConfigError, w + ": level must be 'signed-distance' or 'quadratic'");
  a.blend_width = number(j, "blend_width", w, a.blend_width);
  if (!(a.blend_width > 0)) throw Error(ErrorCode::ConfigError, w + ": blend_width must be positive");
  return a;
}

InterfacePtr parse_geometry(const json& c, const std::string& where) {
  if (!c.contains("geometry")) throw Error(ErrorCode::ConfigError, where + ": missing key 'geometry'");
  return build_geometry(c.at("geometry"), where + ".geometry");
}

Field parse_field(const json& c, const std::string& key, const FieldContext& fc, const std::string& where) {
  if (!c.contains(key)) throw Error(ErrorCode::ConfigError, where + ": missing key '" + key + "'");
  return build_field(c.at(key), fc, where + "." + key);
}

Field parse_vector_field(const json& c, const std::string& key, const FieldContext& fc, const std::string& where,
                         bool optional = false) {
  if (optional && !c.contains(key)) return fields::zero(fc.dim, fc.dim);
  Field f = parse_field(c, key, fc, where);
  if (f.dim() != fc.dim || f.components() != fc.dim)
    throw Error(ErrorCode::ConfigError, where + "." + key + ": needs a vector field on R^" + std::to_string(fc.dim));
  return f;
}

Field parse_scalar_field(const json& c, const std::string& key, const FieldContext& fc, const std::string& where) {
  Field f = parse_field(c, key, fc, where);
  if (f.dim() != fc.dim || f.components() != 1)
    throw Error(ErrorCode::ConfigError, where + "." + key + ": needs a scalar field on R^" + std::to_string(fc.dim));
  return f;
}

AcSetup parse_ac_setup(const json& c, const std::string& where, const InterfacePtr& g) {
  AcSetup s;
  s.shape = g;
  if (g->codim() != 1) throw Error(ErrorCode::ConfigError, where + ": phase-field sweeps need a hypersurface");
  s.schedule = parse_schedule(c, where, ExtrapolationModel::LinearInEps);
  s.ansatz = parse_ansatz(c, where);
  s.transverse_order = integer(c, "transverse_order", where, 8);
  if (s.transverse_order < 2) throw Error(ErrorCode::ConfigError, where + ": transverse_order must be at least 2");
  if (c.contains("extra_breaks")) s.extra_breaks = numbers(c, "extra_breaks", where);
  s.oracle = boolean(c, "oracle", where, false);
  return s;
}

std::vector<double> parse_p_list(const json& c, const std::string& where, double fallback) {
  std::vector<double> ps;
  if (!c.contains("p"))
    ps = {fallback};
  else if (c.at("p").is_array())
    ps = numbers(c, "p", where);
  else
    ps = {number(c, "p", where)};
  if (ps.empty()) throw Error(ErrorCode::ConfigError, where + ": 'p' is empty");
  for (double p : ps)
    if (!(p > 1.0)) throw Error(ErrorCode::ConfigError, where + ": p must exceed 1");
  return ps;
}

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%g", p);
  return buf;
}

void oracle_check(CaseResult& r, const ConvergenceRecord& rec, const Tolerances& tol) {
  double worst = 0;
  for (std::size_t k = 0; k < rec.values.size(); ++k)
    worst = std::max(worst, rec.residual_2[k] / std::max(tol["oracle_floor"], tol["oracle_relative"] * std::abs(rec.values[k])));
  at_most(r, "oracle_over_tolerance", worst, 1.0);
}

// identities

Plan plan_identities(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  const std::string check = text(c, "check", w);
  Plan plan{{ctx.name}, {}};
  if (check == "random-variations") {
    check_keys(c, w, with_common({"check", "count"}));
    const int count = integer(c, "count", w, 10);
    if (count < 1) throw Error(ErrorCode::ConfigError, w + ": count must be positive");
    const Tolerances tol(c, w, {{"first", 1e-8}, {"second_relative", 1e-6}, {"oracle_relative", 1e-4}, {"oracle_floor", 1e-6}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      SeededRng rng = case_rng(ctx);
      Table t;
      double fv = 0, sv = 0, o1 = 0, o2 = 0;
      json cases = json::array();
      for (int i = 0; i < count; ++i) {
        const RandomVariationCase rc = random_variation_case(i, rng);
        const VariationReport rep = variation_report(*rc.integrand, rc.u, rc.eta, rc.zeta, rc.rule);
        t.add(i, rep.second_inner, rep.oracle.second, rep.fv_residual, rep.sv_residual);
        fv = std::max(fv, std::abs(rep.fv_residual));
        sv = std::max(sv, std::abs(rep.sv_residual) / (1.0 + std::abs(rep.second_inner)));
        o1 = std::max(o1, rep.oracle_first_gap / std::max(tol["oracle_floor"], tol["oracle_relative"] * std::abs(rep.first_inner)));
        o2 = std::max(o2, rep.oracle_second_gap / std::max(tol["oracle_floor"], tol["oracle_relative"] * std::abs(rep.second_inner)));
        json d = rep.to_json();
        d["family"] = rc.family;
        d["dim"] = rc.dim;
        cases.push_back(d);
      }
      at_most(r, "first_relation", fv, tol["first"]);
      at_most(r, "second_relation_relative", sv, tol["second_relative"]);
      at_most(r, "oracle_first_over_tolerance", o1, 1.0);
      at_most(r, "oracle_second_over_tolerance", o2, 1.0);
      r.csv = t.csv();
      r.details["cases"] = cases;
      return std::vector<CaseResult>{r};
    };
  } else if (check == "good-identity") {
    check_keys(c, w, with_common({"check", "count", "points"}));
    const int count = integer(c, "count", w, 10);
    const int points = integer(c, "points", w, 1000);
    if (count < 1 || points < count) throw Error(ErrorCode::ConfigError, w + ": need count >= 1 and points >= count");
    const Tolerances tol(c, w, {{"residual", 1e-9}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      SeededRng rng = case_rng(ctx);
      Table t;
      double worst = 0;
      for (int f = 0; f < count; ++f) {
        const int dim = f % 2 == 0 ? 2 : 3;
        const Field eta = random_torus_field(dim, dim, rng, 0.5);
        const int n = points / count + (f < points % count ? 1 : 0);
        double res = 0, scale = 0;
        for (int k = 0; k < n; ++k) {
          Point x(dim);
          for (int i = 0; i < dim; ++i) x[i] = rng.uniform(0, 1);
          res = std::max(res, std::abs(good_identity_residual(eta, x)));
          const SmallMat j = eta.jacobian(x);
          scale = std::max(scale, std::abs(j.trace() * j.trace() - (j * j).trace()));
        }
        t.add(f, res, 0.0, scale, n);
        worst = std::max(worst, res);
      }
      at_most(r, "pointwise_residual", worst, tol["residual"]);
      r.csv = t.csv();
      r.details["points"] = points;
      return std::vector<CaseResult>{r};
    };
  } else if (check == "gl-discrepancy") {
    check_keys(c, w, with_common({"check", "count"}));
    const int count = integer(c, "count", w, 10);
    if (count < 1) throw Error(ErrorCode::ConfigError, w + ": count must be positive");
    const Tolerances tol(c, w, {{"pointwise", 1e-10}, {"integrated", 1e-10}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      SeededRng rng = case_rng(ctx);
      const InterfacePtr shapes[2] = {make_straight_filament(make_point({0, 0.5, 0.5}), 0, 1.0, true, 32),
                                      make_circular_filament(make_point({0.5, 0.5, 0.5}), 0.3, 64)};
      Table t;
      double pointwise = 0, integrated = 0;
      for (int f = 0; f < count; ++f) {
        const Field eta = random_torus_field(3, 3, rng, 0.5);
        const GlDiscrepancy d = gl_discrepancy(*shapes[f % 2], eta);
        t.add(f, d.real_form, d.dbar_form, d.max_pointwise_gap, 0.0);
        pointwise = std::max(pointwise, d.max_pointwise_gap);
        integrated = std::max(integrated, std::abs(d.real_form - d.dbar_form) / (1.0 + std::abs(d.dbar_form)));
      }
      at_most(r, "pointwise_gap", pointwise, tol["pointwise"]);
      at_most(r, "integrated_gap", integrated, tol["integrated"]);
      r.csv = t.csv();
      return std::vector<CaseResult>{r};
    };
  } else if (check == "sphere-values") {
    check_keys(c, w, with_common({"check", "geometry", "a", "omega"}));
    const InterfacePtr g = parse_geometry(c, w);
    const auto round = round_parameters(*g);
    if (g->kind() != "sphere" || !round) throw Error(ErrorCode::ConfigError, w + ": needs a sphere");
    const double a = number(c, "a", w);
    const Point omega = c.contains("omega") ? point(c, "omega", w) : make_point({0.3, -0.2, 0.5});
    if (omega.size() != 3) throw Error(ErrorCode::ConfigError, w + ": 'omega' needs 3 entries");
    const Tolerances tol(c, w, {{"relative", 1e-8}, {"rotation", 1e-8}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      const double R = round->second;
      const Point center = round->first;
      const Field eta = fields::linear(SmallMat(a * SmallMat::Identity(3, 3)), Point(-a * center));
      const Field zero = fields::zero(3, 3);
      const double sve = area_second_inner_variation(*g, eta, zero);
      const double disc = ac_discrepancy(*g, eta);
      const Field rot = fields::rotation3d(omega);
      const double rv = area_second_inner_variation(*g, rot, zeta_eta(rot));
      const double sve_target = 8 * kPi * R * R * a * a, disc_target = 4 * kPi * R * R * a * a;
      Table t;
      t.add(R, sve, sve_target, 0, 0);
      t.add(R, disc, disc_target, 0, 0);
      t.add(R, rv, 0.0, 0, 0);
      at_most(r, "dilation_variation_relative", std::abs(sve - sve_target) / std::max(1e-300, std::abs(sve_target)), tol["relative"]);
      at_most(r, "dilation_discrepancy_relative", std::abs(disc - disc_target) / std::max(1e-300, std::abs(disc_target)), tol["relative"]);
      at_most(r, "rotation_variation", std::abs(rv), tol["rotation"]);
      r.csv = t.csv();
      r.details = {{"radius", R}, {"a", a}};
      return std::vector<CaseResult>{r};
    };
  } else {
    throw Error(ErrorCode::ConfigError, w + ": unknown check '" + check + "'");
  }
  return plan;
}

// profile

double gamma_constant(double p) {
  const double a = 2.0 * (p - 1.0) / p;
  return std::sqrt(kPi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
}

Plan plan_profile(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"p"}));
  const std::vector<double> ps = numbers(c, "p", w);
  if (ps.empty()) throw Error(ErrorCode::ConfigError, w + ": 'p' is empty");
  for (double p : ps)
    if (!(p >= 1.0)) throw Error(ErrorCode::ConfigError, w + ": p must be at least 1");
  const Tolerances tol(c, w, {{"closed_form", 1e-12}, {"gamma", 1e-10}, {"equipartition", 1e-8}, {"energy", 1e-8}});
  Plan plan{{ctx.name}, {}};
  plan.run = [=] {
    CaseResult r;
    r.name = ctx.name;
    Table t;
    for (double p : ps) {
      const double cp = c_p(p);
      const bool closed = p == 1.0 || p == 2.0;
      const double target = p == 1.0 ? 2.0 : p == 2.0 ? 4.0 / 3.0 : gamma_constant(p);
      at_most(r, "c_" + p_tag(p).substr(1), std::abs(cp - target), closed ? tol["closed_form"] : tol["gamma"]);
      double equi = 0, ener = 0;
      if (p > 1.0) {
        const ProfileTable prof(p, false);
        const double top = std::min(prof.s_max(), 40.0);
        for (double s = -top; s <= top; s += top / 997.0) {
          const auto v = prof.eval(s);
          equi = std::max(equi, std::abs(std::pow(std::abs(v.d1), p) - double_well(v.q)));
        }
        const double edge = std::isfinite(prof.s_star()) ? prof.s_star() : prof.s_max();
        std::vector<double> br{0.0};
        for (double s = 0.25; s < edge; s *= 1.125) br.push_back(s);
        br.push_back(edge);
        const Rule1D rule = composite_gauss(br, 12);
        std::vector<double> terms(rule.size());
        for (std::size_t k = 0; k < rule.size(); ++k) {
          const auto v = prof.eval(rule.x[k]);
          terms[k] = rule.w[k] * (std::pow(std::abs(v.d1), p) / p + (p - 1.0) * double_well(v.q) / p);
        }
        ener = std::abs(2.0 * pairwise_sum(terms) - cp);
        at_most(r, "equipartition_" + p_tag(p), equi, tol["equipartition"]);
        at_most(r, "energy_identity_" + p_tag(p), ener, tol["energy"]);
      }
      t.add(p, cp, target, equi, ener);
    }
    r.csv = t.csv();
    return std::vector<CaseResult>{r};
  };
  return plan;
}

// ac-converge

Plan plan_ac(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "p", "eta", "zeta", "schedule", "ansatz", "transverse_order", "extra_breaks",
                                "oracle", "linearity"}));
  const InterfacePtr g = parse_geometry(c, w);
  const AcSetup base = parse_ac_setup(c, w, g);
  const FieldContext fc{g->ambient_dim(), g};
  const Field eta = parse_vector_field(c, "eta", fc, w);
  const Field zeta = parse_vector_field(c, "zeta", fc, w, true);
  const std::vector<double> ps = parse_p_list(c, w, 2.0);
  const bool linearity = boolean(c, "linearity", w, false);
  if (linearity && ps.size() < 2) throw Error(ErrorCode::ConfigError, w + ": linearity needs at least two values of p");
  const Tolerances tol(c, w, {{"gap", 0.01}, {"rate", 0.9}, {"oracle_relative", 1e-4}, {"oracle_floor", 1e-6},
                              {"linearity_slope", 0.02}, {"linearity_intercept", 0.01}});
  Plan plan;
  for (double p : ps) plan.outputs.push_back(ctx.name + "-" + p_tag(p));
  if (linearity) plan.outputs.push_back(ctx.name + "-linearity");
  plan.run = [=, outputs = plan.outputs] {
    std::vector<CaseResult> out;
    std::vector<double> xs, ys;
    double sve = 0, disc = 0;
    Table lt;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      AcSetup s = base;
      s.p = ps[k];
      const ConvergenceRecord rec = ac_limit_experiment(s, eta, zeta);
      CaseResult r;
      r.name = outputs[k];
      take_record(r, rec);
      at_most(r, "gap", rec.gap(), tol["gap"]);
      rate_check(r, rec, tol["rate"]);
      if (s.oracle) oracle_check(r, rec, tol);
      sve = rec.extra["area_second_variation"].get<double>();
      disc = rec.extra["discrepancy"].get<double>();
      const double cp = rec.extra["c_p"].get<double>();
      xs.push_back(s.p - 1.0);
      ys.push_back(rec.extrapolated / cp - sve);
      lt.add(s.p, ys.back(), (s.p - 1.0) * disc, rec.extrapolated, cp);
      out.push_back(std::move(r));
    }
    if (linearity) {
      CaseResult r;
      r.name = outputs.back();
      const double n = static_cast<double>(xs.size());
      double mx = 0, my = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k] / n;
        my += ys[k] / n;
      }
      double sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
      }
      const double slope = sxy / sxx, intercept = my - slope * mx;
      const double scale = std::max(std::abs(sve), std::abs(disc));
      at_most(r, "slope_relative", std::abs(slope - disc) / std::max(1e-300, std::abs(disc)), tol["linearity_slope"]);
      at_most(r, "intercept_relative", std::abs(intercept) / std::max(1e-300, scale), tol["linearity_intercept"]);
      r.details = {{"slope", slope}, {"intercept", intercept}, {"discrepancy", disc}, {"area_second_variation", sve}};
      r.csv = lt.csv();
      out.push_back(std::move(r));
    }
    return out;
  };
  return plan;
}

// gl-converge

Plan plan_gl(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "eta", "zeta", "schedule", "radius", "surrogate", "rho_order", "n_theta",
                                "extra_breaks", "oracle"}));
  GlSetup s;
  s.filament = parse_geometry(c, w);
  if (s.filament->codim() != 2 || s.filament->ambient_dim() != 3)
    throw Error(ErrorCode::ConfigError, w + ": vortex sweeps need a filament in R^3");
  s.schedule = parse_schedule(c, w, ExtrapolationModel::LinearInInverseLog);
  s.radius = number(c, "radius", w, 1.0);
  s.surrogate = boolean(c, "surrogate", w, false);
  s.rho_order = integer(c, "rho_order", w, 8);
  s.n_theta = integer(c, "n_theta", w, 16);
  if (!(s.radius > 0) || s.rho_order < 2 || s.n_theta < 4)
    throw Error(ErrorCode::ConfigError, w + ": need radius > 0, rho_order >= 2, n_theta >= 4");
  if (c.contains("extra_breaks")) s.extra_breaks = numbers(c, "extra_breaks", w);
  s.oracle = boolean(c, "oracle", w, false);
  const FieldContext fc{3, s.filament};
  const Field eta = parse_vector_field(c, "eta", fc, w);
  const Field zeta = parse_vector_field(c, "zeta", fc, w, true);
  const Tolerances tol(c, w, {{"gap", 0.10}, {"energy_gap", 0.05}, {"forms", 1e-10}, {"oracle_relative", 1e-4},
                              {"oracle_floor", 1e-6}});
  Plan plan{{ctx.name + "-variation", ctx.name + "-energy"}, {}};
  plan.run = [=, outputs = plan.outputs] {
    const GlResult res = gl_limit_experiment(s, eta, zeta);
    CaseResult v, e;
    v.name = outputs[0];
    e.name = outputs[1];
    take_record(v, res.variation);
    take_record(e, res.energy);
    at_most(v, "gap", res.variation.gap(), tol["gap"]);
    at_most(v, "discrepancy_forms_pointwise", res.variation.extra["discrepancy_pointwise_gap"].get<double>(), tol["forms"]);
    if (s.oracle) oracle_check(v, res.variation, tol);
    at_most(e, "gap", res.energy.gap(), tol["energy_gap"]);
    return std::vector<CaseResult>{v, e};
  };
  return plan;
}

// tensors

Plan plan_tensors(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "p", "phi", "indices", "schedule", "ansatz", "transverse_order",
                                "extra_breaks"}));
  const InterfacePtr g = parse_geometry(c, w);
  AcSetup s = parse_ac_setup(c, w, g);
  s.p = number(c, "p", w, 2.0);
  if (!(s.p > 1.0)) throw Error(ErrorCode::ConfigError, w + ": p must exceed 1");
  const FieldContext fc{g->ambient_dim(), g};
  const Field phi = parse_scalar_field(c, "phi", fc, w);
  std::vector<int> idx;
  for (double v : numbers(c, "indices", w)) {
    if (v != std::floor(v) || v < 1 || v > g->ambient_dim())
      throw Error(ErrorCode::ConfigError, w + ": indices run from 1 to the dimension");
    idx.push_back(static_cast<int>(v) - 1);
  }
  if (idx.size() != 2 && idx.size() != 4) throw Error(ErrorCode::ConfigError, w + ": give two or four indices");
  const Tolerances tol(c, w, {{"gap", 0.02}, {"max_abs", std::nan("")}, {"symmetry", 1e-10}});
  Plan plan{{ctx.name}, {}};
  plan.run = [=] {
    const ConvergenceRecord rec = tensor_pairing_experiment(s, phi, idx);
    CaseResult r;
    r.name = ctx.name;
    take_record(r, rec);
    if (tol.has("max_abs")) {
      double m = 0;
      for (double v : rec.values) m = std::max(m, std::abs(v));
      at_most(r, "max_abs", m, tol["max_abs"]);
    } else {
      at_most(r, "gap", rec.gap(), tol["gap"]);
    }
    double sym = 0;
    for (double v : rec.residual_1) sym = std::max(sym, std::abs(v));
    at_most(r, "symmetry", sym, tol["symmetry"]);
    return std::vector<CaseResult>{r};
  };
  return plan;
}

// equipartition

Plan plan_equipartition(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "p", "schedule", "ansatz", "stretch", "transverse_order", "extra_breaks"}));
  const InterfacePtr g = parse_geometry(c, w);
  AcSetup s = parse_ac_setup(c, w, g);
  s.p = number(c, "p", w, 2.0);
  s.stretch = number(c, "stretch", w, 1.0);
  if (!(s.p > 1.0) || !(s.stretch > 0)) throw Error(ErrorCode::ConfigError, w + ": need p > 1 and stretch > 0");
  const Tolerances tol(c, w, {{"max_value", std::nan("")}, {"min_value", std::nan("")}, {"rate", std::nan("")}});
  if (!tol.has("max_value") && !tol.has("min_value") && !tol.has("rate"))
    throw Error(ErrorCode::ConfigError, w + ".tolerances: give max_value, min_value or rate");
  Plan plan{{ctx.name}, {}};
  plan.run = [=] {
    const ConvergenceRecord rec = equipartition_residuals(s);
    CaseResult r;
    r.name = ctx.name;
    take_record(r, rec);
    double hi = 0, lo = INFINITY;
    for (std::size_t k = 0; k < rec.values.size(); ++k) {
      hi = std::max({hi, rec.values[k], rec.residual_1[k]});
      lo = std::min(lo, rec.values[k]);
    }
    if (tol.has("max_value")) at_most(r, "max_value", hi, tol["max_value"]);
    if (tol.has("min_value")) at_least(r, "min_value", lo, tol["min_value"]);
    if (tol.has("rate")) rate_check(r, rec, tol["rate"]);
    return std::vector<CaseResult>{r};
  };
  return plan;
}

// volume

VolumeResolution parse_resolution(const json& c, const std::string& where) {
  VolumeResolution res;
  if (!c.contains("resolution")) return res;
  const json& j = c.at("resolution");
  const std::string w = where + ".resolution";
  check_keys(j, w, {"radial_breaks", "n_radial", "n_theta", "n_phi"});
  if (j.contains("radial_breaks")) res.radial_breaks = numbers(j, "radial_breaks", w);
  res.n_radial = integer(j, "n_radial", w, res.n_radial);
  res.n_theta = integer(j, "n_theta", w, res.n_theta);
  res.n_phi = integer(j, "n_phi", w, res.n_phi);
  if (res.radial_breaks.size() < 2 || res.n_radial < 1 || res.n_theta < 1 || res.n_phi < 1)
    throw Error(ErrorCode::ConfigError, w + ": resolution must be positive");
  return res;
}

InterfacePtr round_geometry(const json& c, const std::string& w) {
  const InterfacePtr g = parse_geometry(c, w);
  if (!round_parameters(*g)) throw Error(ErrorCode::ConfigError, w + ": needs a circle or sphere");
  return g;
}

Plan plan_volume(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  const std::string check = text(c, "check", w);
  Plan plan{{ctx.name}, {}};
  if (check == "admissibility") {
    check_keys(c, w, with_common({"check", "geometry", "eta", "zeta", "expect_c1", "resolution"}));
    const InterfacePtr g = round_geometry(c, w);
    const FieldContext fc{g->ambient_dim(), g};
    const Field eta = parse_vector_field(c, "eta", fc, w);
    const Field zeta = parse_vector_field(c, "zeta", fc, w, true);
    const VolumeResolution res = parse_resolution(c, w);
    const bool has_c1 = c.contains("expect_c1");
    const double c1 = has_c1 ? number(c, "expect_c1", w) : 0.0;
    const Tolerances tol(c, w, {{"c2", 1e-10}, {"flux", 1e-8}, {"c1", 1e-8}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      const VolumeCheck v = volume_admissibility(g, eta, zeta, res);
      Table t;
      t.add(0, v.c2, 0, v.c1, v.flux);
      at_most(r, "c2", std::abs(v.c2), tol["c2"]);
      at_most(r, "c1_against_flux", std::abs(v.c1 - v.flux), tol["flux"]);
      if (has_c1) at_most(r, "c1_against_expected", std::abs(v.c1 - c1) / (1.0 + std::abs(c1)), tol["c1"]);
      r.csv = t.csv();
      r.details = {{"c1", v.c1}, {"c2", v.c2}, {"flux", v.flux}};
      return std::vector<CaseResult>{r};
    };
  } else if (check == "random-admissibility") {
    check_keys(c, w, with_common({"check", "geometry", "count", "resolution"}));
    const InterfacePtr g = round_geometry(c, w);
    const int count = integer(c, "count", w, 10);
    if (count < 1) throw Error(ErrorCode::ConfigError, w + ": count must be positive");
    const VolumeResolution res = parse_resolution(c, w);
    const Tolerances tol(c, w, {{"c2", 1e-10}, {"flux", 1e-8}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      SeededRng rng = case_rng(ctx);
      const auto round = round_parameters(*g);
      Table t;
      double c2 = 0, fl = 0;
      for (int i = 0; i < count; ++i) {
        const Field eta = random_compact_field(g->ambient_dim(), round->first, round->second, rng);
        const VolumeCheck v = volume_admissibility(g, eta, zeta_eta(eta), res);
        t.add(i, v.c2, 0, v.c1, v.flux);
        c2 = std::max(c2, std::abs(v.c2));
        fl = std::max(fl, std::abs(v.c1 - v.flux));
      }
      at_most(r, "c2", c2, tol["c2"]);
      at_most(r, "c1_against_flux", fl, tol["flux"]);
      r.csv = t.csv();
      return std::vector<CaseResult>{r};
    };
  } else if (check == "perturbation") {
    check_keys(c, w, with_common({"check", "geometry", "eta", "phi", "region_radius", "schedule", "ansatz",
                                  "transverse_order", "extra_breaks", "expect_error"}));
    const InterfacePtr g = round_geometry(c, w);
    AcSetup s = parse_ac_setup(c, w, g);
    const FieldContext fc{g->ambient_dim(), g};
    const Field eta = parse_vector_field(c, "eta", fc, w);
    const Field phi = parse_vector_field(c, "phi", fc, w);
    const double region = number(c, "region_radius", w);
    if (!(region > round_parameters(*g)->second)) throw Error(ErrorCode::ConfigError, w + ": region_radius must exceed the radius");
    std::optional<ErrorCode> expect;
    if (c.contains("expect_error")) {
      const std::string name = text(c, "expect_error", w);
      expect = parse_error_code(name);
      if (!expect) throw Error(ErrorCode::ConfigError, w + ": unknown error name '" + name + "'");
    }
    const Tolerances tol(c, w, {{"rate", 0.9}, {"constraint", 1e-9}});
    plan.run = [=] {
      CaseResult r;
      r.name = ctx.name;
      if (expect) {
        std::string got = "none";
        try {
          perturbation_experiment(s, eta, phi, region);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::ConfigError) throw;
          got = error_code_name(e.code());
          r.details["message"] = e.what();
        }
        r.checks.push_back({"expected_error", 0.0, 0.0, false, got == error_code_name(*expect)});
        r.details["error"] = got;
        r.csv = Table().csv();
        return std::vector<CaseResult>{r};
      }
      const ConvergenceRecord rec = perturbation_experiment(s, eta, phi, region);
      take_record(r, rec);
      rate_check(r, rec, tol["rate"]);
      double worst = 0;
      for (double v : rec.residual_1) worst = std::max(worst, std::abs(v));
      at_most(r, "constraint", worst, tol["constraint"]);
      return std::vector<CaseResult>{r};
    };
  } else {
    throw Error(ErrorCode::ConfigError, w + ": unknown check '" + check + "'");
  }
  return plan;
}

// poincare

Plan plan_poincare(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "xi", "width", "norm_factor"}));
  const InterfacePtr g = parse_geometry(c, w);
  if (!g->closed() || g->codim() != 1) throw Error(ErrorCode::ConfigError, w + ": needs a closed hypersurface");
  const FieldContext fc{g->ambient_dim(), g};
  const Field xi = parse_scalar_field(c, "xi", fc, w);
  const double width = number(c, "width", w);
  if (!(width > 0)) throw Error(ErrorCode::ConfigError, w + ": width must be positive");
  const bool has_factor = c.contains("norm_factor");
  const double factor = has_factor ? number(c, "norm_factor", w) : 0.0;
  const Tolerances tol(c, w, {{"relative", 1e-6}});
  Plan plan{{ctx.name}, {}};
  plan.run = [=] {
    CaseResult r;
    r.name = ctx.name;
    const PoincareCheck p = constrained_poincare_check(g, xi, width);
    Table t;
    t.add(0, p.lhs, p.rhs, p.mean, p.norm_sq);
    at_most(r, "lhs_against_rhs", std::abs(p.lhs - p.rhs) / (1.0 + std::abs(p.rhs)), tol["relative"]);
    if (has_factor) {
      const double expect = factor * p.norm_sq;
      at_most(r, "rhs_against_norm", std::abs(p.rhs - expect) / (1.0 + std::abs(expect)), tol["relative"]);
    }
    r.csv = t.csv();
    r.details = {{"lhs", p.lhs}, {"rhs", p.rhs}, {"mean", p.mean}, {"norm_sq", p.norm_sq}};
    return std::vector<CaseResult>{r};
  };
  return plan;
}

// forms

Plan plan_forms(const json& c, const Context& ctx) {
  const std::string& w = ctx.where;
  check_keys(c, w, with_common({"geometry", "xi", "width", "schedule", "ansatz", "transverse_order", "extra_breaks"}));
  const InterfacePtr g = parse_geometry(c, w);
  AcSetup s = parse_ac_setup(c, w, g);
  s.p = 2.0;
  const FieldContext fc{g->ambient_dim(), g};
  const Field xi = parse_scalar_field(c, "xi", fc, w);
  const double width = number(c, "width", w);
  if (!(width > 0)) throw Error(ErrorCode::ConfigError, w + ": width must be positive");
  const Tolerances tol(c, w, {{"gap", 0.02}});
  Plan plan{{ctx.name}, {}};
  plan.run = [=] {
    const ConvergenceRecord rec = quadratic_forms_experiment(s, xi, width);
    CaseResult r;
    r.name = ctx.name;
    take_record(r, rec);
    const double norm = c_p(2.0) * surface_integral(*g, fields::product(xi, xi));
    const double scale = std::abs(rec.target) > 1e-8 * norm ? std::abs(rec.target) : norm;
    at_most(r, "scaled_gap", std::abs(rec.extrapolated - rec.target) / std::max(1e-300, scale), tol["gap"]);
    r.details = {{"scale", scale}, {"c2_norm_sq", norm}};
    return std::vector<CaseResult>{r};
  };
  return plan;
}

using Planner = Plan (*)(const json&, const Context&);

const std::vector<std::pair<std::string, Planner>>& planners() {
  static const std::vector<std::pair<std::string, Planner>> p{
      {"identities", plan_identities}, {"profile", plan_profile},   {"ac-converge", plan_ac},
      {"gl-converge", plan_gl},         {"tensors", plan_tensors},   {"equipartition", plan_equipartition},
      {"volume", plan_volume},          {"poincare", plan_poincare}, {"forms", plan_forms}};
  return p;
}

bool valid_name(const std::string& s) {
  if (s.empty() || s == "summary") return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' ||
           ch == '.';
  });
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
    os << data;
    if (!os.flush()) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

json Check::to_json() const {
  return {{"name", name}, {"value", finite_or_null(value)}, {"limit", finite_or_null(limit)},
          {"sense", at_least ? "at-least" : "at-most"}, {"pass", pass}};
}

json CaseResult::summary() const {
  json j = {{"name", name}, {"pass", pass}, {"seconds", seconds}};
  json cs = json::array();
  for (const auto& c : checks) cs.push_back(c.to_json());
  j["checks"] = cs;
  if (!record.is_null()) j["record"] = record;
  if (!details.empty()) j["details"] = details;
  if (!error.empty()) j["error"] = error;
  return j;
}

json RunResult::summary() const {
  json cs = json::array();
  for (const auto& c : cases) cs.push_back(c.summary());
  return {{"format_version", kSummaryFormatVersion},
          {"name", name},
          {"kind", kind},
          {"description", description},
          {"seed", seed},
          {"pass", pass},
          {"seconds", seconds},
          {"cases", cs}};
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : planners()) v.push_back(name);
    return v;
  }();
  return k;
}

RunResult run_config(const json& config, const RunOptions& options) {
  check_keys(config, "config", {"name", "description", "kind", "seed", "defaults", "cases"});
  RunResult out;
  out.name = text(config, "name", "config", "experiment");
  if (!valid_name(out.name)) throw Error(ErrorCode::ConfigError, "config: name must use letters, digits, '-', '_' or '.'");
  out.description = text(config, "description", "config", "");
  out.kind = text(config, "kind", "config");
  Planner planner = nullptr;
  for (const auto& [name, fn] : planners())
    if (name == out.kind) planner = fn;
  if (!planner) throw Error(ErrorCode::ConfigError, "config: unknown kind '" + out.kind + "'");
  if (config.contains("seed")) {
    const json& s = config.at("seed");
    if (!s.is_number_unsigned()) throw Error(ErrorCode::ConfigError, "config: 'seed' must be a non-negative integer");
    out.seed = s.get<std::uint64_t>();
  }
  if (options.seed) out.seed = *options.seed;
  const json defaults = config.contains("defaults") ? config.at("defaults") : json::object();
  if (!defaults.is_object()) throw Error(ErrorCode::ConfigError, "config: 'defaults' must be an object");
  if (!config.contains("cases") || !config.at("cases").is_array() || config.at("cases").empty())
    throw Error(ErrorCode::ConfigError, "config: 'cases' must be a non-empty list");

  std::vector<Plan> plans;
  std::vector<std::string> names;
  const json& cases = config.at("cases");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!cases[i].is_object()) throw Error(ErrorCode::ConfigError, "config.cases[" + std::to_string(i) + "]: expected an object");
    json merged = defaults;
    for (const auto& [k, v] : cases[i].items()) merged[k] = v;
    Context ctx;
    ctx.seed = out.seed;
    ctx.index = static_cast<int>(i);
    ctx.where = "config.cases[" + std::to_string(i) + "]";
    ctx.name = text(merged, "name", ctx.where);
    ctx.where += " '" + ctx.name + "'";
    Plan plan = planner(merged, ctx);
    for (const auto& n : plan.outputs) {
      if (!valid_name(n)) throw Error(ErrorCode::ConfigError, ctx.where + ": invalid case name '" + n + "'");
      if (std::find(names.begin(), names.end(), n) != names.end())
        throw Error(ErrorCode::ConfigError, ctx.where + ": duplicate case name '" + n + "'");
      names.push_back(n);
    }
    plans.push_back(std::move(plan));
  }

  const int saved_jobs = jobs();
  if (options.jobs > 0) set_jobs(options.jobs);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    for (const Plan& plan : plans) {
      const auto c0 = std::chrono::steady_clock::now();
      std::vector<CaseResult> results;
      try {
        results = plan.run();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        results.clear();
        for (const auto& n : plan.outputs) {
          CaseResult r;
          r.name = n;
          r.error = e.what();
          r.csv = Table().csv();
          results.push_back(r);
        }
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
      for (auto& r : results) {
        r.seconds = secs;
        r.pass = r.error.empty() && !r.checks.empty() &&
                 std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
        out.cases.push_back(std::move(r));
      }
    }
  } catch (...) {
    set_jobs(saved_jobs);
    throw;
  }
  set_jobs(saved_jobs);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.pass = std::all_of(out.cases.begin(), out.cases.end(), [](const CaseResult& c) { return c.pass; });
  return out;
}

RunResult run_config_text(const std::string& text, const std::string& fallback_name, const RunOptions& options) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: malformed JSON: ") + e.what());
  }
  if (j.is_object() && !j.contains("name") && !fallback_name.empty()) j["name"] = fallback_name;
  return run_config(j, options);
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& c : result.cases) write_atomic(dir / (c.name + ".csv"), c.csv);
  write_atomic(dir / "summary.json", result.summary().dump(2) + "\n");
}

}  // namespace innervar
