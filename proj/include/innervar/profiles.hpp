#pragma once

#include <memory>
#include <string>
#include <vector>

#include "innervar/field.hpp"
#include "innervar/geometry.hpp"

namespace innervar {

/// W(z) = (1 - z^2)^2 and its derivatives.
double double_well(double z);
double double_well_d1(double z);
double double_well_d2(double z);

/// Integral of W(s)^((p-1)/p) over [-1, 1], by double-exponential quadrature.
double c_p(double p);

struct ProfileValue {
  double q = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Optimal transition profile: q' = (1 - q^2)^(2/p), q(0) = 0, odd.
///
/// The ODE is integrated node to node with an adaptive Dormand-Prince step
/// and the nodes carry (q, q', q'') from the ODE itself, interpolated by
/// quintic Hermite pieces. Once 1 - q^2 drops below 1e-6 the table hands over
/// to the closed-form tail obtained by freezing q = 1 in the equation for
/// w = 1 - q^2; for p > 2 that tail reaches w = 0 at a finite s*.
/// With `closed_form` set, p = 2 evaluates tanh directly; the table is still
/// built and supplies s_max, s_core and the breakpoints.
class ProfileTable {
 public:
  explicit ProfileTable(double p, bool closed_form = true);

  ProfileValue eval(double s) const;
  double p() const { return p_; }
  /// 1 - |q(s_max)| = 1e-9.
  double s_max() const { return s_max_; }
  /// 1 - |q(s_core)| = 1e-2; sets the ansatz admissibility test.
  double s_core() const { return s_core_; }
  /// Point where q reaches 1 (infinity for p <= 2).
  double s_star() const { return s_star_; }
  /// End of the tabulated range.
  double s_table() const { return nodes_.back(); }
  /// Table nodes (for quadrature breakpoints).
  const std::vector<double>& nodes() const { return nodes_; }
  /// CSV export with columns s, q, dq.
  std::string csv(double s_lo, double s_hi, double step) const;

 private:
  ProfileValue eval_positive(double s) const;
  ProfileValue tail(double s) const;

  double p_;
  double alpha_;
  bool closed_ = false;
  std::vector<double> nodes_, q_, q1_, q2_;
  double w_switch_ = 0.0;
  double s_max_ = 0.0, s_core_ = 0.0, s_star_ = 0.0;
};

/// Degree-one Ginzburg-Landau radial profile: f'' + f'/r - f/r^2 + f(1 - f^2) = 0,
/// f(0) = 0, f -> 1, found by shooting on f'(0) and continued beyond the
/// shooting range by 1 - A/r^2 - B/r^4 matched to value and slope. The
/// surrogate r / sqrt(r^2 + 2) is available for quick runs.
class GlProfile {
 public:
  explicit GlProfile(bool surrogate = false);

  ProfileValue eval(double r) const;
  /// Derivatives of H(s) = f(sqrt s) / sqrt s with respect to s = r^2; smooth
  /// at s = 0.
  ProfileValue ratio(double s) const;
  double slope_at_origin() const { return a_; }
  bool surrogate() const { return surrogate_; }
  /// Radius where f reaches 0.99.
  double r_core() const { return r_core_; }
  double r_match() const { return r_match_; }

 private:
  ProfileValue eval_table(double r) const;

  bool surrogate_;
  double a_ = 0.0;
  std::vector<double> series_;
  double h_ = 0.01;
  double r_match_ = 8.0;
  double tail_a_ = 0.5, tail_b_ = 1.125;
  std::vector<double> f_, f1_, f2_;
  double r_core_ = 0.0;
};

enum class LevelKind { SignedDistance, Quadratic };

struct AnsatzOptions {
  LevelKind level = LevelKind::SignedDistance;
  /// The profile is used for |g| <= width/2 and blended to sign(g) by
  /// |g| = width.
  double blend_width = 0.5;
};

/// u_eps = q(g(x)/eps) near the interface, sign(g) beyond the blend width.
/// Throws EpsilonTooLarge when eps * s_core exceeds half the blend width.
Field ansatz_field(const InterfacePtr& g, double eps, std::shared_ptr<const ProfileTable> profile,
                   const AnsatzOptions& options = {});

/// u_eps = f(rho/eps) e^{i theta} about a filament, as two real components.
/// Throws EpsilonTooLarge when eps * r_core exceeds `tube_radius`.
Field gl_vortex_field(const InterfacePtr& g, double eps, std::shared_ptr<const GlProfile> profile,
                      double tube_radius);

}  // namespace innervar
