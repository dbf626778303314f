#include "innervar/config.hpp"

#include <algorithm>

#include "innervar/calculus.hpp"
#include "innervar/errors.hpp"

namespace innervar::config {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, where + ": " + msg);
}

const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, "missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  check_keys(j, where, std::vector<std::string>(allowed.begin(), allowed.end()));
}

void check_keys(const json& j, const std::string& where, const std::vector<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail(where, "unknown key '" + k + "'");
}

double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) fail(where, "'" + key + "' must be a number");
  return v.get<double>();
}

double number(const json& j, const std::string& key, const std::string& where, double fallback) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer()) fail(where, "'" + key + "' must be an integer");
  return v.get<int>();
}

int integer(const json& j, const std::string& key, const std::string& where, int fallback) {
  return j.contains(key) ? integer(j, key, where) : fallback;
}

bool boolean(const json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(where, "'" + key + "' must be true or false");
  return j.at(key).get<bool>();
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) fail(where, "'" + key + "' must be a string");
  return v.get<std::string>();
}

std::string text(const json& j, const std::string& key, const std::string& where, const std::string& fallback) {
  return j.contains(key) ? text(j, key, where) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_array()) fail(where, "'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(where, "'" + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Point point(const json& j, const std::string& key, const std::string& where) {
  const auto v = numbers(j, key, where);
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) fail(where, "'" + key + "' must have 1 to 3 entries");
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

InterfacePtr build_geometry(const json& j, const std::string& where) {
  const std::string type = text(j, "type", where);
  const std::string w = where + " (" + type + ")";
  if (type == "flat") {
    check_keys(j, w, {"type", "dim", "normal_axis", "offset", "lo", "hi", "periodic", "panels", "order"});
    FlatPatchSpec s;
    s.dim = integer(j, "dim", w);
    if (s.dim != 2 && s.dim != 3) fail(w, "dim must be 2 or 3");
    s.normal_axis = integer(j, "normal_axis", w, 0);
    if (s.normal_axis < 0 || s.normal_axis >= s.dim) fail(w, "normal_axis out of range");
    s.offset = number(j, "offset", w, 0.0);
    s.lo = point(j, "lo", w);
    s.hi = point(j, "hi", w);
    if (s.lo.size() != s.dim || s.hi.size() != s.dim) fail(w, "lo and hi need one entry per axis");
    s.periodic = boolean(j, "periodic", w, false);
    s.panels = integer(j, "panels", w, 8);
    s.order = integer(j, "order", w, 8);
    if (s.panels < 1 || s.order < 1) fail(w, "panels and order must be positive");
    return make_flat_patch(s);
  }
  if (type == "circle") {
    check_keys(j, w, {"type", "center", "radius", "n"});
    const Point c = point(j, "center", w);
    if (c.size() != 2) fail(w, "center must have 2 entries");
    const double r = number(j, "radius", w);
    if (!(r > 0)) fail(w, "radius must be positive");
    return make_circle(c, r, integer(j, "n", w, 64));
  }
  if (type == "sphere") {
    check_keys(j, w, {"type", "center", "radius", "n_theta", "n_phi"});
    const Point c = point(j, "center", w);
    if (c.size() != 3) fail(w, "center must have 3 entries");
    const double r = number(j, "radius", w);
    if (!(r > 0)) fail(w, "radius must be positive");
    const int nt = integer(j, "n_theta", w, 16);
    return make_sphere(c, r, nt, integer(j, "n_phi", w, 2 * nt));
  }
  if (type == "straight-filament") {
    check_keys(j, w, {"type", "origin", "axis", "length", "periodic", "n"});
    const Point o = point(j, "origin", w);
    if (o.size() != 3) fail(w, "origin must have 3 entries");
    const int axis = integer(j, "axis", w, 0);
    if (axis < 0 || axis > 2) fail(w, "axis out of range");
    const double len = number(j, "length", w);
    if (!(len > 0)) fail(w, "length must be positive");
    return make_straight_filament(o, axis, len, boolean(j, "periodic", w, true), integer(j, "n", w, 16));
  }
  if (type == "circular-filament") {
    check_keys(j, w, {"type", "center", "radius", "n"});
    const Point c = point(j, "center", w);
    if (c.size() != 3) fail(w, "center must have 3 entries");
    const double r = number(j, "radius", w);
    if (!(r > 0)) fail(w, "radius must be positive");
    return make_circular_filament(c, r, integer(j, "n", w, 64));
  }
  fail(where, "unknown geometry type '" + type + "'");
}

namespace {

int field_dim(const json& j, const FieldContext& ctx, const std::string& where) {
  const int d = integer(j, "dim", where, ctx.dim);
  if (d < 1 || d > kMaxDim) fail(where, "dim must be 1 to 3");
  return d;
}

std::array<bool, kMaxDim> axes_mask(const json& j, const std::string& where) {
  std::array<bool, kMaxDim> m{true, true, true};
  if (!j.contains("axes")) return m;
  const json& a = j.at("axes");
  if (!a.is_array() || a.size() > static_cast<std::size_t>(kMaxDim)) fail(where, "'axes' must be a list of booleans");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_boolean()) fail(where, "'axes' must be a list of booleans");
    m[i] = a[i].get<bool>();
  }
  return m;
}

Point sized_point(const json& j, const std::string& key, int dim, const std::string& where) {
  const Point p = point(j, key, where);
  if (p.size() != dim) fail(where, "'" + key + "' needs " + std::to_string(dim) + " entries");
  return p;
}

std::vector<Field> field_list(const json& j, const std::string& key, const FieldContext& ctx, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_array() || v.empty()) fail(where, "'" + key + "' must be a non-empty list of fields");
  std::vector<Field> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(build_field(v[i], ctx, where + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

Field build_field(const json& j, const FieldContext& ctx, const std::string& where) {
  const std::string type = text(j, "type", where);
  const std::string w = where + " (" + type + ")";
  using namespace innervar::fields;
  if (type == "zero") {
    check_keys(j, w, {"type", "dim", "components"});
    const int d = field_dim(j, ctx, w);
    return zero(d, integer(j, "components", w, d));
  }
  if (type == "constant") {
    check_keys(j, w, {"type", "dim", "value"});
    const int d = field_dim(j, ctx, w);
    return constant(d, point(j, "value", w));
  }
  if (type == "linear") {
    check_keys(j, w, {"type", "dim", "matrix", "offset"});
    const int d = field_dim(j, ctx, w);
    const json& m = need(j, "matrix", w);
    if (!m.is_array() || m.size() != static_cast<std::size_t>(d)) fail(w, "'matrix' must be dim x dim");
    SmallMat a(d, d);
    for (int r = 0; r < d; ++r) {
      if (!m[r].is_array() || m[r].size() != static_cast<std::size_t>(d)) fail(w, "'matrix' must be dim x dim");
      for (int c = 0; c < d; ++c) {
        if (!m[r][c].is_number()) fail(w, "'matrix' entries must be numbers");
        a(r, c) = m[r][c].get<double>();
      }
    }
    const Point b = j.contains("offset") ? sized_point(j, "offset", d, w) : Point(Point::Zero(d));
    return linear(a, b);
  }
  if (type == "dilation") {
    check_keys(j, w, {"type", "dim", "a"});
    return dilation(field_dim(j, ctx, w), number(j, "a", w));
  }
  if (type == "rotation2d") {
    check_keys(j, w, {"type", "omega"});
    return rotation2d(number(j, "omega", w));
  }
  if (type == "rotation3d") {
    check_keys(j, w, {"type", "omega"});
    return rotation3d(sized_point(j, "omega", 3, w));
  }
  if (type == "coordinate") {
    check_keys(j, w, {"type", "dim", "index"});
    const int d = field_dim(j, ctx, w);
    const int i = integer(j, "index", w);
    if (i < 0 || i >= d) fail(w, "index out of range");
    return coordinate(d, i);
  }
  if (type == "polynomial") {
    check_keys(j, w, {"type", "dim", "components", "center"});
    const int d = field_dim(j, ctx, w);
    const json& comps = need(j, "components", w);
    if (!comps.is_array() || comps.empty()) fail(w, "'components' must be a non-empty list");
    std::vector<std::vector<Monomial>> cs;
    for (const auto& comp : comps) {
      if (!comp.is_array()) fail(w, "each component is a list of monomials");
      std::vector<Monomial> ms;
      for (const auto& m : comp) {
        check_keys(m, w + " monomial", {"coef", "power"});
        Monomial mono;
        mono.coef = number(m, "coef", w);
        const auto pw = numbers(m, "power", w);
        if (pw.size() != static_cast<std::size_t>(d)) fail(w, "'power' needs one entry per axis");
        for (int i = 0; i < d; ++i) {
          if (pw[i] < 0 || pw[i] != static_cast<int>(pw[i])) fail(w, "powers must be non-negative integers");
          mono.power[i] = static_cast<int>(pw[i]);
        }
        ms.push_back(mono);
      }
      cs.push_back(ms);
    }
    std::optional<Point> center;
    if (j.contains("center")) center = sized_point(j, "center", d, w);
    return polynomial(d, cs, center);
  }
  if (type == "trigonometric") {
    check_keys(j, w, {"type", "dim", "components"});
    const int d = field_dim(j, ctx, w);
    const json& comps = need(j, "components", w);
    if (!comps.is_array() || comps.empty()) fail(w, "'components' must be a non-empty list");
    std::vector<std::vector<TrigTerm>> cs;
    for (const auto& comp : comps) {
      if (!comp.is_array()) fail(w, "each component is a list of terms");
      std::vector<TrigTerm> ts;
      for (const auto& t : comp) {
        check_keys(t, w + " term", {"coef", "k", "phase"});
        TrigTerm term;
        term.coef = number(t, "coef", w);
        term.phase = number(t, "phase", w, 0.0);
        const auto k = numbers(t, "k", w);
        if (k.size() != static_cast<std::size_t>(d)) fail(w, "'k' needs one entry per axis");
        for (int i = 0; i < d; ++i) term.k[i] = k[i];
        ts.push_back(term);
      }
      cs.push_back(ts);
    }
    return trigonometric(d, cs);
  }
  if (type == "bump") {
    check_keys(j, w, {"type", "dim", "center", "radius", "axes"});
    const int d = field_dim(j, ctx, w);
    const double r = number(j, "radius", w);
    if (!(r > 0)) fail(w, "radius must be positive");
    return radial_bump(d, sized_point(j, "center", d, w), r, axes_mask(j, w));
  }
  if (type == "plateau") {
    check_keys(j, w, {"type", "dim", "center", "inner", "outer", "axes"});
    const int d = field_dim(j, ctx, w);
    const double in = number(j, "inner", w), out = number(j, "outer", w);
    if (!(in >= 0 && out > in)) fail(w, "need 0 <= inner < outer");
    return plateau(d, sized_point(j, "center", d, w), in, out, axes_mask(j, w));
  }
  if (type == "scaled") {
    check_keys(j, w, {"type", "field", "factor"});
    return scaled(build_field(need(j, "field", w), ctx, w + ".field"), number(j, "factor", w));
  }
  if (type == "sum") {
    check_keys(j, w, {"type", "terms"});
    auto ts = field_list(j, "terms", ctx, w);
    Field f = ts.front();
    for (std::size_t i = 1; i < ts.size(); ++i) f = sum(f, ts[i]);
    return f;
  }
  if (type == "difference") {
    check_keys(j, w, {"type", "a", "b"});
    return difference(build_field(need(j, "a", w), ctx, w + ".a"), build_field(need(j, "b", w), ctx, w + ".b"));
  }
  if (type == "product") {
    check_keys(j, w, {"type", "scalar", "field"});
    const Field s = build_field(need(j, "scalar", w), ctx, w + ".scalar");
    if (s.components() != 1) fail(w, "'scalar' must be a scalar field");
    return product(s, build_field(need(j, "field", w), ctx, w + ".field"));
  }
  if (type == "stack") {
    check_keys(j, w, {"type", "components"});
    auto cs = field_list(j, "components", ctx, w);
    for (const auto& c : cs)
      if (c.components() != 1) fail(w, "stacked components must be scalar");
    return stack(cs);
  }
  if (type == "compose") {
    check_keys(j, w, {"type", "outer", "inner"});
    const Field inner = build_field(need(j, "inner", w), ctx, w + ".inner");
    FieldContext oc = ctx;
    oc.dim = inner.components();
    return compose(build_field(need(j, "outer", w), oc, w + ".outer"), inner);
  }
  if (type == "zeta-eta") {
    check_keys(j, w, {"type", "of"});
    return innervar::zeta_eta(build_field(need(j, "of", w), ctx, w + ".of"));
  }
  if (type == "normal-extension") {
    check_keys(j, w, {"type", "xi", "width"});
    if (!ctx.geometry) fail(w, "needs a geometry");
    return innervar::normal_extension(ctx.geometry, build_field(need(j, "xi", w), ctx, w + ".xi"), number(j, "width", w));
  }
  fail(where, "unknown field type '" + type + "'");
}

}  // namespace innervar::config
