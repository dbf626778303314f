#pragma once

#include <span>

#include "innervar/field.hpp"

namespace innervar {

/// trace of the jacobian of `v` at `x`
double divergence(const Field& v, const Point& x);
Field divergence_field(const Field& v);

/// -(div eta) eta + (eta . grad) eta, the acceleration that makes the
/// deformation x + t eta + t^2/2 zeta volume preserving to second order.
Field zeta_eta(const Field& eta);

/// X0 = D^2u(eta, eta) + grad u . (2 (grad eta) eta - zeta), one component per
/// component of u; the t^2 coefficient (times 2) of u(Phi_t^{-1}(y)).
Field x0_field(const Field& u, const Field& eta, const Field& zeta);

/// -grad u . eta, one component per component of u.
Field minus_grad_dot(const Field& u, const Field& eta);

struct DetCoefficients {
  double c0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// det(I + tA + t^2/2 B) = c0 + t c1 + t^2/2 c2 + O(t^3) with A = grad eta,
/// B = grad zeta.
DetCoefficients det_expansion(const Field& eta, const Field& zeta, const Point& x);

/// (div eta)^2 - tr((grad eta)^2) - div((div eta) eta - (eta . grad) eta)
double good_identity_residual(const Field& eta, const Point& x);

class DeformationMap {
 public:
  DeformationMap(Field eta, Field zeta, double t);

  Point deform(const Point& x) const;
  SmallMat jacobian(const Point& x) const;
  /// Newton inversion from y - t eta(y); throws NonInvertible after 50
  /// iterations without reaching a 1e-12 residual.
  Point invert(const Point& y) const;
  double t() const { return t_; }

 private:
  Field eta_, zeta_;
  double t_;
};

/// Largest |t| (with a safety factor 1/2) for which ||t A + t^2/2 B|| < 1 at
/// every sample point, which keeps det grad Phi_t positive there.
double diffeomorphism_bound(const Field& eta, const Field& zeta, std::span<const Point> samples);

}  // namespace innervar
