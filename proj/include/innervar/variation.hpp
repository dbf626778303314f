#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "innervar/field.hpp"
#include "innervar/quadrature.hpp"

namespace innervar {

inline constexpr int kMaxState = 2;
inline constexpr int kMaxFlat = kMaxState * kMaxDim;

/// State gradient P(a, i) = d u^a / d x_i.
using StateGrad = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxState, kMaxDim>;
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxState, 1>;
/// Flattened gradient-space vector, index a * N + i.
using FlatVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxFlat, 1>;
using FlatMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxFlat, kMaxFlat>;
using MixedMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxState, kMaxFlat>;
using StateMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxState, kMaxState>;

/// F and its partials at one (z, P). Second-order entries are filled only
/// when requested.
struct IntegrandValue {
  double f = 0.0;
  StateVec fz;
  FlatVec fp;
  StateMat fzz;
  MixedMat fzp;
  FlatMat fpp;
  /// The part of fpp beyond its isotropic block: the (p - 2) four-tensor
  /// of the p-Laplacian, empty-size zero for other integrands.
  FlatMat fpp_tensor;
};

FlatVec flatten(const StateGrad& p);
StateGrad unflatten(const FlatVec& v, int state_dim, int dim);

class IntegrandImpl {
 public:
  explicit IntegrandImpl(int state_dim) : state_dim_(state_dim) {}
  virtual ~IntegrandImpl() = default;
  int state_dim() const { return state_dim_; }
  virtual std::string label() const = 0;
  virtual double value(const StateVec& z, const StateGrad& p) const = 0;
  /// order 1: f, fz, fp; order 2 adds fzz, fzp, fpp, fpp_tensor.
  virtual IntegrandValue eval(const StateVec& z, const StateGrad& p, int order) const = 0;
  virtual nlohmann::json describe() const = 0;

 private:
  int state_dim_;
};

using Integrand = std::shared_ptr<const IntegrandImpl>;

namespace integrands {

/// |P|^2 / 2
Integrand dirichlet(int state_dim = 1);
/// eps^(p-1) |P|^p / p + (p-1) W(z) / (p eps) with W = (1 - z^2)^2.
/// For p < 2 the factor |P|^(p-2) is read as (|P|^2 + 1e-24)^((p-2)/2), and
/// the four-tensor term is dropped where |P| < 1e-9.
Integrand p_allen_cahn(double eps, double p);
/// (1/|log eps|) (|P|^2 / 2 + (1 - |z|^2)^2 / (4 eps^2)), two real components.
Integrand ginzburg_landau(double eps);

/// a(z) |P|^2 / 2 + (b . P) c(z) + V(z) + kappa (1 + |P|^2)^(r/2) with
/// a = a0 + a1 sin z, c = c1 z + c2 z^2, V = v2 z^2 + v4 z^4 (scalar state).
struct QuasiLinearParams {
  double a0 = 1.0, a1 = 0.0;
  std::array<double, kMaxDim> b{};
  double c1 = 0.0, c2 = 0.0;
  double v2 = 0.0, v4 = 0.0;
  double kappa = 0.0, r = 1.0;
};
Integrand quasi_linear(const QuasiLinearParams& params);

}  // namespace integrands

/// Check every partial of F against central differences of lower-order
/// entries at (z, P); returns the largest discrepancy relative to 1 + |entry|.
double integrand_partials_error(const IntegrandImpl& f, const StateVec& z, const StateGrad& p);

double energy(const IntegrandImpl& f, const Field& u, const BulkRule& rule);

/// dA(u, phi) = int F_z phi + F_P : grad phi
double first_variation(const IntegrandImpl& f, const Field& u, const Field& phi, const BulkRule& rule);
/// d^2A(u, phi) = int F_zz phi phi + 2 F_zP phi grad phi + F_PP[grad phi, grad phi]
double second_variation(const IntegrandImpl& f, const Field& u, const Field& phi, const BulkRule& rule);

/// delta A(u, eta) = int F div eta - F_P : (grad u grad eta)
double first_inner_variation(const IntegrandImpl& f, const Field& u, const Field& eta, const BulkRule& rule);

/// Terms of the second inner variation with J = grad eta, K = grad zeta:
///   fx           int F (div zeta + (div eta)^2 - tr J^2)
///   div_coupling -2 int (F_P, P J) div eta
///   y_term       -2 int (F_P, P K / 2 - P J^2)
///   hessian      int F_PP[P J, P J]
/// `tensor` is the share of `hessian` carried by the four-tensor part of F_PP.
struct SecondInnerTerms {
  double fx = 0.0;
  double div_coupling = 0.0;
  double y_term = 0.0;
  double hessian = 0.0;
  double tensor = 0.0;
  double total() const { return fx + div_coupling + y_term + hessian; }
};

SecondInnerTerms second_inner_variation_terms(const IntegrandImpl& f, const Field& u, const Field& eta,
                                              const Field& zeta, const BulkRule& rule);
double second_inner_variation(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                              const BulkRule& rule);

/// A(u o Phi_t^{-1}) = int F(u, grad u (grad Phi_t)^{-1}) |det grad Phi_t| at fixed nodes.
double deformed_energy(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                       const BulkRule& rule, double t);

struct OracleValues {
  double first = 0.0;
  double second = 0.0;
  double step = 0.0;
};

/// Five-point differences in t of the deformed energy, combined per node
/// before summation. step <= 0 picks 1e-3 / (1 + max |grad eta|).
OracleValues inner_variation_oracle(const IntegrandImpl& f, const Field& u, const Field& eta,
                                    const Field& zeta, const BulkRule& rule, double step = 0.0);

/// delta^2 A - d^2A(u, -grad u . eta) - dA(u, X0)
double sv_relation_residual(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                            const BulkRule& rule);

struct VariationReport {
  std::string integrand;
  double energy = 0.0;
  double first_inner = 0.0;
  double second_inner = 0.0;
  SecondInnerTerms terms;
  double first_of_transport = 0.0;   // dA(u, -grad u . eta)
  double second_of_transport = 0.0;  // d^2A(u, -grad u . eta)
  double first_of_x0 = 0.0;          // dA(u, X0)
  OracleValues oracle;
  double fv_residual = 0.0;  // first_inner - first_of_transport
  double sv_residual = 0.0;  // second_inner - second_of_transport - first_of_x0
  double oracle_first_gap = 0.0;
  double oracle_second_gap = 0.0;

  nlohmann::json to_json() const;
};

VariationReport variation_report(const IntegrandImpl& f, const Field& u, const Field& eta, const Field& zeta,
                                 const BulkRule& rule);

}  // namespace innervar
