#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "innervar/geometry.hpp"
#include "innervar/profiles.hpp"
#include "innervar/variation.hpp"

namespace innervar {

enum class ExtrapolationModel { LinearInEps, LinearInInverseLog };

const char* extrapolation_model_name(ExtrapolationModel m);
ExtrapolationModel parse_extrapolation_model(const std::string& name);

struct EpsilonSchedule {
  std::vector<double> eps;
  ExtrapolationModel model = ExtrapolationModel::LinearInEps;

  /// eps0 * 2^-k for k < n.
  static EpsilonSchedule geometric(double eps0, int n, ExtrapolationModel model = ExtrapolationModel::LinearInEps);
  /// Throws ConfigError unless positive and strictly decreasing.
  void validate() const;
};

/// One eps-sweep: measured values with two auxiliary residual columns, a
/// line fit over the last `window` points in the chosen model, and the
/// observed rate from successive differences.
struct ConvergenceRecord {
  std::string label;
  ExtrapolationModel model = ExtrapolationModel::LinearInEps;
  std::vector<double> eps;
  std::vector<double> values;
  std::vector<double> residual_1;
  std::vector<double> residual_2;
  double target = 0.0;

  double extrapolated = 0.0;
  double slope = 0.0;
  /// Observed order p in value = limit + C eps^p. NaN when fewer than two
  /// differences clear the noise floor.
  double rate = 0.0;
  /// All successive differences in the window sit at the noise floor.
  bool below_noise = false;
  int window = 4;
  /// Experiment-specific figures (target components, timings).
  nlohmann::json extra = nlohmann::json::object();

  void push(double e, double value, double r1, double r2);
  /// Recompute extrapolated, slope, rate and below_noise from the stored data.
  void fit();
  double gap() const;
  /// value = limit + C eps^rate with rate >= min_rate, or a converged tail.
  bool rate_at_least(double min_rate) const;

  nlohmann::json summary() const;
  /// Columns epsilon,value,target,gap,residual_1,residual_2; per-row gap uses
  /// the measured value.
  std::string csv() const;
};

/// Transverse rule in the signed distance s for tube quadrature around a
/// phase-field layer of width eps: graded panels in s/eps near the
/// interface, breakpoints at the profile table end, the contact point s*, the
/// blend band [width/2, width], and `extra` distances. For the quadratic
/// level the level-set breakpoints are mapped to distances.
std::vector<double> transverse_breaks(const Interface& g, double eps, const ProfileTable& profile,
                                      const AnsatzOptions& options, std::span<const double> extra = {});
Rule1D transverse_rule(const Interface& g, double eps, const ProfileTable& profile, const AnsatzOptions& options,
                       int order, std::span<const double> extra = {});

struct AcSetup {
  InterfacePtr shape;
  double p = 2.0;
  EpsilonSchedule schedule;
  AnsatzOptions ansatz;
  int transverse_order = 8;
  std::vector<double> extra_breaks;
  /// Evaluate the deformed-energy oracle at each eps.
  bool oracle = true;
  /// The ansatz uses q(stretch * g / eps); stretch != 1 breaks equipartition.
  double stretch = 1.0;
};

/// delta^2 E_eps(u_eps, eta, zeta) for the p-Allen-Cahn energy at each eps;
/// target c_p (delta^2 E(G, eta, zeta) + (p - 1) disc). residual_1 is
/// E_eps - c_p |G|, residual_2 the deformed-energy oracle gap.
ConvergenceRecord ac_limit_experiment(const AcSetup& setup, const Field& eta, const Field& zeta);

/// L1 norms of eps^(p-1)|grad u|^p - W(u)/eps (value) and of
/// eps^(p-1)|grad u|^p - |grad Phi(u)| (residual_1); target 0.
ConvergenceRecord equipartition_residuals(const AcSetup& setup);

/// Bulk pairing of eps^(p-1)|grad u|^(p-2) du_i du_j (or the four-index
/// analogue with |grad u|^(p-4)) against phi; target c_p int_G n_i n_j phi.
/// residual_1 is the largest change under index permutations.
ConvergenceRecord tensor_pairing_experiment(const AcSetup& setup, const Field& phi, const std::vector<int>& indices);

struct GlSetup {
  InterfacePtr filament;
  EpsilonSchedule schedule{{}, ExtrapolationModel::LinearInInverseLog};
  /// Radius of the cylinder the energy lives in; the ansatz must fit inside.
  double radius = 1.0;
  bool surrogate = false;
  int rho_order = 8;
  int n_theta = 16;
  std::vector<double> extra_breaks;
  bool oracle = true;
};

struct GlResult {
  /// delta^2 E_eps against pi (delta^2 E + real discrepancy form);
  /// residual_1 is delta E_eps, residual_2 the deformed-energy oracle gap.
  ConvergenceRecord variation;
  /// E_eps against pi |G|.
  ConvergenceRecord energy;
};

GlResult gl_limit_experiment(const GlSetup& setup, const Field& eta, const Field& zeta);

/// Cylinder rule around a filament for the vortex layer of width eps.
Rule1D vortex_radial_rule(double eps, double radius, int order, std::span<const double> extra = {});

struct VolumeCheck {
  double c1 = 0.0;    // int_E div eta
  double c2 = 0.0;    // int_E div zeta + (div eta)^2 - tr (grad eta)^2
  double flux = 0.0;  // int_G eta . n
};

struct VolumeResolution {
  std::vector<double> radial_breaks{0.0, 0.25, 0.5, 0.75, 1.0};
  int n_radial = 12;
  int n_theta = 32;
  int n_phi = 64;
};

/// Volume functionals over the disk or ball enclosed by a round shape.
VolumeCheck volume_admissibility(const InterfacePtr& g, const Field& eta, const Field& zeta,
                                 const VolumeResolution& res = {});

struct PoincareCheck {
  double lhs = 0.0;   // area second inner variation at (V, zeta^V)
  double rhs = 0.0;   // Jacobi form of xi
  double mean = 0.0;  // int_G xi
  double norm_sq = 0.0;
};

/// Throws ConfigError when |int_G xi| exceeds 1e-10.
PoincareCheck constrained_poincare_check(const InterfacePtr& g, const Field& xi, double width);

struct PerturbedField {
  Field eta_eps;
  double h = 0.0;
  double numerator = 0.0;    // -int u div eta = int grad u . eta
  double denominator = 0.0;  // int u div phi = -int grad u . phi
  double constraint = 0.0;   // int u div eta_eps over the region route
};

/// eta + h phi with h = -int u div eta / int u div phi. Both integrals are
/// taken in the form -int grad u . (.) over `tube`, which must cover the
/// support of grad u; the constraint is re-evaluated in divergence form over
/// `region`. Throws DegenerateReference if |int u div phi| < 1e-8.
PerturbedField perturbed_field(const Field& u, const Field& eta, const Field& phi, const BulkRule& tube,
                               const BulkRule& region);

/// h(eps) along the schedule for the ansatz about a round shape; residual_1
/// is the constraint left by eta_eps, residual_2 the denominator. The region
/// is the ball of radius `region_radius` with radial panels at the tube
/// breakpoints, the extra breaks and every region_radius / 40. Throws
/// DegenerateReference when phi has no flux through G.
ConvergenceRecord perturbation_experiment(const AcSetup& setup, const Field& eta, const Field& phi, double region_radius);

/// p = 2 quadratic forms for V = normal_extension(xi). value is
/// Q_eps(-grad u . V) + dE(u, X0), which is delta^2 E_eps(u, V, zeta^V);
/// residual_1 is the bare Q_eps(-grad u . V), residual_2 dE(u, X0); target
/// c_2 Q(xi).
ConvergenceRecord quadratic_forms_experiment(const AcSetup& setup, const Field& xi, double width);

}  // namespace innervar
