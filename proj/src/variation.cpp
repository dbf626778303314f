#include "innervar/variation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "innervar/calculus.hpp"
#include "innervar/errors.hpp"

namespace innervar {

FlatVec flatten(const StateGrad& p) {
  const int m = static_cast<int>(p.rows()), n = static_cast<int>(p.cols());
  FlatVec v(m * n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) v[a * n + i] = p(a, i);
  return v;
}

StateGrad unflatten(const FlatVec& v, int state_dim, int dim) {
  StateGrad p(state_dim, dim);
  for (int a = 0; a < state_dim; ++a)
    for (int i = 0; i < dim; ++i) p(a, i) = v[a * dim + i];
  return p;
}

namespace {

IntegrandValue blank(int m, int n, int order) {
  IntegrandValue v;
  v.fz = StateVec::Zero(m);
  v.fp = FlatVec::Zero(m * n);
  if (order >= 2) {
    v.fzz = StateMat::Zero(m, m);
    v.fzp = MixedMat::Zero(m, m * n);
    v.fpp = FlatMat::Zero(m * n, m * n);
    v.fpp_tensor = FlatMat::Zero(m * n, m * n);
  }
  return v;
}

class Dirichlet final : public IntegrandImpl {
 public:
  using IntegrandImpl::IntegrandImpl;
  std::string label() const override { return "dirichlet"; }
  double value(const StateVec&, const StateGrad& p) const override { return 0.5 * p.squaredNorm(); }
  IntegrandValue eval(const StateVec& z, const StateGrad& p, int order) const override {
    const int m = static_cast<int>(z.size()), n = static_cast<int>(p.cols());
    IntegrandValue v = blank(m, n, order);
    v.f = value(z, p);
    v.fp = flatten(p);
    if (order >= 2) v.fpp.setIdentity();
    return v;
  }
  nlohmann::json describe() const override { return {{"type", "dirichlet"}, {"state_dim", state_dim()}}; }
};

class PAllenCahn final : public IntegrandImpl {
 public:
  PAllenCahn(double eps, double p) : IntegrandImpl(1), eps_(eps), p_(p), scale_(std::pow(eps, p - 1.0)) {}
  std::string label() const override {
    std::ostringstream os;
    os << "p-allen-cahn(p=" << p_ << ",eps=" << eps_ << ")";
    return os.str();
  }
  double r2(const StateGrad& p) const { return p.squaredNorm() + (p_ < 2.0 ? kReg2 : 0.0); }
  double value(const StateVec& z, const StateGrad& p) const override {
    const double w = (1.0 - z[0] * z[0]) * (1.0 - z[0] * z[0]);
    return scale_ * std::pow(r2(p), 0.5 * p_) / p_ + (p_ - 1.0) * w / (p_ * eps_);
  }
  IntegrandValue eval(const StateVec& z, const StateGrad& p, int order) const override {
    const int n = static_cast<int>(p.cols());
    IntegrandValue v = blank(1, n, order);
    const double s = r2(p);
    const double x = z[0];
    v.f = value(z, p);
    v.fz[0] = (p_ - 1.0) * (-4.0 * x * (1.0 - x * x)) / (p_ * eps_);
    const double g = std::pow(s, 0.5 * (p_ - 2.0));
    const FlatVec pf = flatten(p);
    v.fp = scale_ * g * pf;
    if (order >= 2) {
      v.fzz(0, 0) = (p_ - 1.0) * (12.0 * x * x - 4.0) / (p_ * eps_);
      v.fpp = scale_ * g * FlatMat::Identity(n, n);
      if (p_ != 2.0 && p.norm() >= 1e-9) {
        v.fpp_tensor = scale_ * (p_ - 2.0) * std::pow(s, 0.5 * (p_ - 4.0)) * pf * pf.transpose();
        v.fpp += v.fpp_tensor;
      }
    }
    return v;
  }
  nlohmann::json describe() const override {
    return {{"type", "p-allen-cahn"}, {"eps", eps_}, {"p", p_}};
  }

 private:
  static constexpr double kReg2 = 1e-24;
  double eps_, p_, scale_;
};

class GinzburgLandau final : public IntegrandImpl {
 public:
  explicit GinzburgLandau(double eps) : IntegrandImpl(2), eps_(eps), k_(1.0 / std::abs(std::log(eps))) {}
  std::string label() const override {
    std::ostringstream os;
    os << "ginzburg-landau(eps=" << eps_ << ")";
    return os.str();
  }
  double value(const StateVec& z, const StateGrad& p) const override {
    const double d = 1.0 - z.squaredNorm();
    return k_ * (0.5 * p.squaredNorm() + d * d / (4.0 * eps_ * eps_));
  }
  IntegrandValue eval(const StateVec& z, const StateGrad& p, int order) const override {
    const int n = static_cast<int>(p.cols());
    IntegrandValue v = blank(2, n, order);
    const double d = 1.0 - z.squaredNorm();
    const double e2 = eps_ * eps_;
    v.f = value(z, p);
    v.fz = -k_ * d / e2 * z;
    v.fp = k_ * flatten(p);
    if (order >= 2) {
      v.fzz = k_ / e2 * (-d * StateMat::Identity(2, 2) + 2.0 * z * z.transpose());
      v.fpp = k_ * FlatMat::Identity(2 * n, 2 * n);
    }
    return v;
  }
  nlohmann::json describe() const override { return {{"type", "ginzburg-landau"}, {"eps", eps_}}; }

 private:
  double eps_, k_;
};

class QuasiLinear final : public IntegrandImpl {
 public:
  explicit QuasiLinear(const integrands::QuasiLinearParams& q) : IntegrandImpl(1), q_(q) {}
  std::string label() const override { return "quasi-linear"; }
  double value(const StateVec& zv, const StateGrad& p) const override {
    const double z = zv[0];
    const double p2 = p.squaredNorm();
    double bp = 0.0;
    for (int i = 0; i < p.cols(); ++i) bp += q_.b[i] * p(0, i);
    return (q_.a0 + q_.a1 * std::sin(z)) * 0.5 * p2 + bp * (q_.c1 * z + q_.c2 * z * z) + q_.v2 * z * z +
           q_.v4 * z * z * z * z + q_.kappa * std::pow(1.0 + p2, 0.5 * q_.r);
  }
  IntegrandValue eval(const StateVec& zv, const StateGrad& p, int order) const override {
    const int n = static_cast<int>(p.cols());
    IntegrandValue v = blank(1, n, order);
    const double z = zv[0];
    const double p2 = p.squaredNorm();
    const FlatVec pf = flatten(p);
    FlatVec b(n);
    for (int i = 0; i < n; ++i) b[i] = q_.b[i];
    const double bp = b.dot(pf);
    const double a = q_.a0 + q_.a1 * std::sin(z), a1 = q_.a1 * std::cos(z), a2 = -q_.a1 * std::sin(z);
    const double c = q_.c1 * z + q_.c2 * z * z, c1 = q_.c1 + 2.0 * q_.c2 * z, c2 = 2.0 * q_.c2;
    const double g = std::pow(1.0 + p2, 0.5 * q_.r - 1.0);
    v.f = value(zv, p);
    v.fz[0] = a1 * 0.5 * p2 + bp * c1 + 2.0 * q_.v2 * z + 4.0 * q_.v4 * z * z * z;
    v.fp = a * pf + c * b + q_.kappa * q_.r * g * pf;
    if (order >= 2) {
      v.fzz(0, 0) = a2 * 0.5 * p2 + bp * c2 + 2.0 * q_.v2 + 12.0 * q_.v4 * z * z;
      v.fzp.row(0) = (a1 * pf + c1 * b).transpose();
      v.fpp = (a + q_.kappa * q_.r * g) * FlatMat::Identity(n, n) +
              q_.kappa * q_.r * (q_.r - 2.0) * std::pow(1.0 + p2, 0.5 * q_.r - 2.0) * pf * pf.transpose();
    }
    return v;
  }
  nlohmann::json describe() const override {
    return {{"type", "quasi-linear"}, {"a0", q_.a0}, {"a1", q_.a1}, {"b", q_.b}, {"c1", q_.c1},
            {"c2", q_.c2}, {"v2", q_.v2}, {"v4", q_.v4}, {"kappa", q_.kappa}, {"r", q_.r}};
  }

 private:
  integrands::QuasiLinearParams q_;
};

}  // namespace

namespace integrands {

Integrand dirichlet(int state_dim) {
  if (state_dim < 1 || state_dim > kMaxState)
    throw Error(ErrorCode::DimensionMismatch, "state dimension must be 1 or 2");
  return std::make_shared<Dirichlet>(state_dim);
}

Integrand p_allen_cahn(double eps, double p) {
  if (!(eps > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be positive");
  if (!(p > 1.0)) throw Error(ErrorCode::ConfigError, "p must exceed 1");
  return std::make_shared<PAllenCahn>(eps, p);
}

Integrand ginzburg_landau(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::ConfigError, "epsilon must lie in (0, 1)");
  return std::make_shared<GinzburgLandau>(eps);
}

Integrand quasi_linear(const QuasiLinearParams& params) { return std::make_shared<QuasiLinear>(params); }

}  // namespace integrands

double integrand_partials_error(const IntegrandImpl& f, const StateVec& z, const StateGrad& p) {
  const int m = static_cast<int>(z.size()), n = static_cast<int>(p.cols());
  const IntegrandValue v = f.eval(z, p, 2);
  double worst = 0.0;
  auto note = [&](double exact, double fd) { worst = std::max(worst, std::abs(exact - fd) / (1.0 + std::abs(exact))); };
  const double h = 1e-5;
  for (int a = 0; a < m; ++a) {
    StateVec zp = z, zm = z;
    zp[a] += h;
    zm[a] -= h;
    note(v.fz[a], (f.value(zp, p) - f.value(zm, p)) / (2 * h));
    const IntegrandValue vp = f.eval(zp, p, 1), vm = f.eval(zm, p, 1);
    for (int b = 0; b < m; ++b) note(v.fzz(b, a), (vp.fz[b] - vm.fz[b]) / (2 * h));
    for (int k = 0; k < m * n; ++k) note(v.fzp(a, k), (vp.fp[k] - vm.fp[k]) / (2 * h));
  }
  for (int k = 0; k < m * n; ++k) {
    StateGrad pp = p, pm = p;
    pp(k / n, k % n) += h;
    pm(k / n, k % n) -= h;
    note(v.fp[k], (f.value(z, pp) - f.value(z, pm)) / (2 * h));
    const IntegrandValue vp = f.eval(z, pp, 1), vm = f.eval(z, pm, 1);
    for (int l = 0; l < m * n; ++l) note(v.fpp(l, k), (vp.fp[l] - vm.fp[l]) / (2 * h));
  }
  return worst;
}

namespace {

struct State {
  StateVec z;
  StateGrad p;
};

State state_at(const Field& u, const Point& x) {
  const int m = u.components(), n = u.dim();
  const JetArray j = u.at(x, 1);
  State s{StateVec(m), StateGrad(m, n)};
  for (int a = 0; a < m; ++a) {
    s.z[a] = j[a].v;
    for (int i = 0; i < n; ++i) s.p(a, i) = j[a].g[i];
  }
  return s;
}

void check_state(const IntegrandImpl& f, const Field& u) {
  if (u.components() != f.state_dim())
    throw Error(ErrorCode::DimensionMismatch, "field has " + std::to_string(u.components()) +
                                                  " components but the integrand expects " +
                                                  std::to_string(f.state_dim()));
}

void check_dim(const Field& u, const Field& v, int components, const char* what) {
  if (v.dim() != u.dim() || v.components() != components)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has the wrong shape");
}

SmallMat jac_of(const JetArray& j, int n) {
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = j[i].g[k];
  return m;
}

}  // namespace

double energy(const IntegrandImpl& f, const Field& u, const BulkRule& rule) {
  check_state(f, u);
  return integrate(rule, [&](const Point& x) {
    const State s = state_at(u, x);
    return f.value(s.z, s.p);
  });
}

double first_variation(const IntegrandImpl& f, const Field& u, const Field& phi, const BulkRule& rule) {
  check_state(f, u);
  check_dim(u, phi, u.components(), "test function");
  return integrate(rule, [&](const Point& x) {
    const State s = state_at(u, x);
    const State t = state_at(phi, x);
    const IntegrandValue v = f.eval(s.z, s.p, 1);
    return v.fz.dot(t.z) + v.fp.dot(flatten(t.p));
  });
}

double second_variation(const IntegrandImpl& f, const Field& u, const Field& phi, const BulkRule& rule) {
  check_state(f, u);
  check_dim(u, phi, u.components(), "test function");
  return integrate(rule, [&](const Point& x) {
    const State s = state_at(u, x);
    const State t = state_at(phi, x);
    const IntegrandValue v = f.eval(s.z, s.p, 2);
    const FlatVec g = flatten(t.p);
    return t.z.dot(v.fzz * t.z) + 2.0 * t.z.dot(v.fzp * g) + g.dot(v.fpp * g);
  });
}

double first_inner_variation(const IntegrandImpl& f, const Field& u, const Field& eta, const BulkRule& rule) {
  check_state(f, u);
  check_dim(u, eta, u.dim(), "velocity field");
  const int n = u.dim();
  return integrate(rule, [&](const Point& x) {
    const State s = state_at(u, x);
    const SmallMat j = jac_of(eta.at(x, 1), n);
    const IntegrandValue v = f.eval(s.z, s.p, 1);
    const StateGrad pj = s.p * j;
    return v.f * j.trace() - v.fp.dot(flatten(pj));
  });
}

SecondInnerTerms second_inner_variation_terms(const IntegrandImpl& f, const Field& u, const Field& eta,
                                              const Field& zeta, const BulkRule& rule) {
  check_state(f, u);
  check_dim(u, eta, u.dim(), "velocity field");
  check_dim(u, zeta, u.dim(), "acceleration field");
  const int n = u.dim();
  const auto r = integrate_many(rule, 5, [&](const Point& x, std::span<double> out) {
    const State s = state_at(u, x);
    const SmallMat j = jac_of(eta.at(x, 1), n);
    const SmallMat k = jac_of(zeta.at(x, 1), n);
    const IntegrandValue v = f.eval(s.z, s.p, 2);
    const double div = j.trace();
    const SmallMat j2 = j * j;
    const double xterm = k.trace() + div * div - j2.trace();
    const StateGrad pj = s.p * j;
    const StateGrad y = 0.5 * (s.p * k) - s.p * j2;
    const FlatVec pjf = flatten(pj);
    out[0] = v.f * xterm;
    out[1] = -2.0 * v.fp.dot(pjf) * div;
    out[2] = -2.0 * v.fp.dot(flatten(y));
    out[3] = pjf.dot(v.fpp * pjf);
    out[4] = pjf.dot(v.fpp_tensor * pjf);
  });
  return SecondInnerTerms{r[0], r[1], r[2], r[3], r[4]};
}

double second_inner_variation(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                              const BulkRule& rule) {
  return second_inner_variation_terms(f, u, eta, zeta, rule).total();
}

namespace {

double deformed_density(const IntegrandImpl& f, const State& s, const SmallMat& j, const SmallMat& k, double t) {
  const int n = static_cast<int>(j.rows());
  const SmallMat m = SmallMat::Identity(n, n) + t * j + 0.5 * t * t * k;
  const Eigen::FullPivLU<SmallMat> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorCode::NonInvertible, "deformation gradient is singular");
  const StateGrad pt = s.p * lu.inverse();
  return f.value(s.z, pt) * std::abs(lu.determinant());
}

}  // namespace

double deformed_energy(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                       const BulkRule& rule, double t) {
  check_state(f, u);
  const int n = u.dim();
  return integrate(rule, [&](const Point& x) {
    const State s = state_at(u, x);
    return deformed_density(f, s, jac_of(eta.at(x, 1), n), jac_of(zeta.at(x, 1), n), t);
  });
}

OracleValues inner_variation_oracle(const IntegrandImpl& f, const Field& u, const Field& eta,
                                    const Field& zeta, const BulkRule& rule, double step) {
  check_state(f, u);
  check_dim(u, eta, u.dim(), "velocity field");
  check_dim(u, zeta, u.dim(), "acceleration field");
  const int n = u.dim();
  double h = step;
  if (!(h > 0.0)) {
    std::vector<double> norms(rule.size());
    parallel_for(rule.size(), [&](std::size_t i) {
      norms[i] = jac_of(eta.at(rule.point(i), 1), n).cwiseAbs().maxCoeff();
    });
    const double top = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
    h = 1e-3 / (1.0 + top);
  }
  const auto r = integrate_many(rule, 2, [&](const Point& x, std::span<double> out) {
    const State s = state_at(u, x);
    const SmallMat j = jac_of(eta.at(x, 1), n), k = jac_of(zeta.at(x, 1), n);
    const double a0 = deformed_density(f, s, j, k, 0.0);
    const double a1 = deformed_density(f, s, j, k, h), am1 = deformed_density(f, s, j, k, -h);
    const double a2 = deformed_density(f, s, j, k, 2 * h), am2 = deformed_density(f, s, j, k, -2 * h);
    out[0] = (8.0 * (a1 - am1) - (a2 - am2)) / (12.0 * h);
    out[1] = (16.0 * ((a1 - a0) + (am1 - a0)) - ((a2 - a0) + (am2 - a0))) / (12.0 * h * h);
  });
  return OracleValues{r[0], r[1], h};
}

double sv_relation_residual(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                            const BulkRule& rule) {
  const double lhs = second_inner_variation(f, u, eta, zeta, rule);
  const double d2 = second_variation(f, u, minus_grad_dot(u, eta), rule);
  const double d1 = first_variation(f, u, x0_field(u, eta, zeta), rule);
  return lhs - d2 - d1;
}

nlohmann::json VariationReport::to_json() const {
  return {{"integrand", integrand},
          {"energy", energy},
          {"first_inner", first_inner},
          {"second_inner", second_inner},
          {"terms",
           {{"fx", terms.fx},
            {"div_coupling", terms.div_coupling},
            {"y_term", terms.y_term},
            {"hessian", terms.hessian},
            {"tensor", terms.tensor}}},
          {"first_of_transport", first_of_transport},
          {"second_of_transport", second_of_transport},
          {"first_of_x0", first_of_x0},
          {"oracle", {{"first", oracle.first}, {"second", oracle.second}, {"step", oracle.step}}},
          {"fv_residual", fv_residual},
          {"sv_residual", sv_residual},
          {"oracle_first_gap", oracle_first_gap},
          {"oracle_second_gap", oracle_second_gap}};
}

VariationReport variation_report(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                                 const BulkRule& rule) {
  VariationReport r;
  r.integrand = f.label();
  r.energy = energy(f, u, rule);
  r.first_inner = first_inner_variation(f, u, eta, rule);
  r.terms = second_inner_variation_terms(f, u, eta, zeta, rule);
  r.second_inner = r.terms.total();
  const Field phi = minus_grad_dot(u, eta);
  r.first_of_transport = first_variation(f, u, phi, rule);
  r.second_of_transport = second_variation(f, u, phi, rule);
  r.first_of_x0 = first_variation(f, u, x0_field(u, eta, zeta), rule);
  r.oracle = inner_variation_oracle(f, u, eta, zeta, rule);
  r.fv_residual = r.first_inner - r.first_of_transport;
  r.sv_residual = r.second_inner - r.second_of_transport - r.first_of_x0;
  r.oracle_first_gap = std::abs(r.first_inner - r.oracle.first);
  r.oracle_second_gap = std::abs(r.second_inner - r.oracle.second);
  return r;
}

}  // namespace innervar
