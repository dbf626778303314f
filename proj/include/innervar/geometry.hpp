#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "innervar/field.hpp"
#include "innervar/quadrature.hpp"

namespace innervar {

/// Quadrature node on an interface with its frame. For hypersurfaces
/// normal[0] is the unit normal and kappa holds the principal curvatures with
/// respect to it (a sphere has positive curvature for the outward normal).
/// For filaments normal = (p, q) is the transverse pair.
struct SurfaceNode {
  Point x;
  double w = 0.0;
  int n_tangent = 0;
  std::array<Point, 2> tangent;
  int n_normal = 0;
  std::array<Point, 2> normal;
  std::array<double, 2> kappa{};
};

/// Parametrized closed or periodic interface (codimension 1 or 2).
class Interface {
 public:
  Interface(int ambient_dim, int codim) : dim_(ambient_dim), codim_(codim) {}
  virtual ~Interface() = default;

  int ambient_dim() const { return dim_; }
  int codim() const { return codim_; }

  virtual std::string kind() const = 0;
  /// True when the interface has no boundary (periodic patches count).
  virtual bool closed() const = 0;
  /// Closed-form (N - codim)-dimensional measure.
  virtual double measure() const = 0;
  virtual std::vector<SurfaceNode> nodes() const = 0;
  /// Same shape with `factor` times the quadrature resolution per axis.
  virtual std::shared_ptr<const Interface> refined(int factor) const = 0;
  /// Smallest radius of curvature; infinity for flat shapes.
  virtual double focal_distance() const = 0;

  /// Signed distance (codim 1), positive on the side the normal points to.
  virtual Jet signed_distance(std::span<const Jet> x) const;
  virtual void closest_point(std::span<const Jet> x, std::span<Jet> out) const;
  /// Unit normal at the closest point, as a field of x.
  virtual void normal(std::span<const Jet> x, std::span<Jet> out) const;
  /// Level function with |grad g| != 1 off the interface: (|x-c|^2 - R^2)/(2R)
  /// for round shapes, the signed distance for flat ones.
  virtual Jet quadratic_level(std::span<const Jet> x) const;

  /// Transverse coordinates (X, Y) of x along (p, q) for filaments.
  virtual void transverse(std::span<const Jet> x, Jet& X, Jet& Y) const;
  /// Axial line element factor for the filament tube volume element at
  /// transverse offset (X, Y): dV = factor * dX dY ds.
  virtual double tube_factor(double X, double Y) const;

 private:
  int dim_;
  int codim_;
};

using InterfacePtr = std::shared_ptr<const Interface>;

struct FlatPatchSpec {
  int dim = 2;
  int normal_axis = 0;
  double offset = 0.0;
  Point lo;  // extents along the tangential axes (normal axis entry ignored)
  Point hi;
  bool periodic = false;
  int panels = 8;
  int order = 8;
};

InterfacePtr make_flat_patch(const FlatPatchSpec& spec);
InterfacePtr make_circle(const Point& center, double radius, int n);
InterfacePtr make_sphere(const Point& center, double radius, int n_theta, int n_phi);
/// Filament along coordinate axis `axis` through `origin`, with p, q the next
/// two coordinate axes (cyclic).
InterfacePtr make_straight_filament(const Point& origin, int axis, double length, bool periodic,
                                    int n);
/// Circle of radius R about `center` in the plane orthogonal to e3, frame
/// (e_r, e_3), which is parallel in the normal bundle.
InterfacePtr make_circular_filament(const Point& center, double radius, int n);

/// Round shapes expose their center and radius; empty for others.
std::optional<std::pair<Point, double>> round_parameters(const Interface& g);

// Surface functionals.

double surface_integral(const Interface& g, const Field& f);
double surface_integral(const Interface& g, const std::function<double(const SurfaceNode&)>& f);

struct SveTerms {
  double div_zeta = 0.0;
  double div_eta_sq = 0.0;
  double normal_part = 0.0;
  double cross_term = 0.0;
  double total() const { return div_zeta + div_eta_sq + normal_part - cross_term; }
};

/// Tangential divergence of zeta plus (div eta)^2 plus the normal parts of
/// the tangential derivatives of eta, minus the tangential cross term
/// sum_ij (tau_i . D_tau_j eta)(tau_j . D_tau_i eta).
SveTerms area_second_inner_variation_terms(const Interface& g, const Field& eta, const Field& zeta);
double area_second_inner_variation(const Interface& g, const Field& eta, const Field& zeta);

/// Measure of Phi_t(G) from the Gram determinant of the pushed tangent frame.
double pushforward_area(const Interface& g, const Field& eta, const Field& zeta, double t);

/// Integral of (n, (grad eta) n)^2 over a hypersurface.
double ac_discrepancy(const Interface& g, const Field& eta);

struct GlDiscrepancy {
  double real_form = 0.0;
  double dbar_form = 0.0;
  double max_pointwise_gap = 0.0;
};

/// |D_perp eta_perp|^2 - 2 Jac_perp(eta_perp) and 4 |d eta_perp^C / d zbar|^2
/// integrated over a filament.
GlDiscrepancy gl_discrepancy(const Interface& g, const Field& eta);
/// Pointwise densities (real, dbar) at a point of the filament with frame (p, q).
std::pair<double, double> gl_discrepancy_density(const SmallMat& jac, const Point& p, const Point& q);

/// Integral of |grad_G xi|^2 - |A|^2 xi^2 over a closed hypersurface.
double jacobi_form(const Interface& g, const Field& xi);
double quadratic_form_limit(const Interface& g, const Field& xi);

/// Normal flux of a vector field through a hypersurface.
double flux(const Interface& g, const Field& eta);

/// xi(pi(x)) n(pi(x)) chi(d(x)) with a smooth cutoff chi equal to 1 for
/// |d| <= width/2 and 0 for |d| >= width.
Field normal_extension(const InterfacePtr& g, const Field& xi, double width);

/// Signed distance and quadratic level functions as scalar fields.
Field signed_distance_field(const InterfacePtr& g);
Field quadratic_level_field(const InterfacePtr& g);

/// Tube rule around a hypersurface: x = y + s n(y) for the given rule in s,
/// weighted by prod (1 + s kappa_i).
BulkRule tube_rule(const Interface& g, const Rule1D& s_rule);
/// Cylinder rule around a filament: transverse polar coordinates with the
/// given rule in rho and a periodic rule in theta.
BulkRule filament_rule(const Interface& g, const Rule1D& rho_rule, int n_theta);
/// Rule for the region enclosed by a circle or sphere; radial breakpoints
/// are scaled to [0, R].
BulkRule enclosed_rule(const Interface& g, std::span<const double> radial_breaks, int n_radial,
                       int n_theta, int n_phi);

/// Quadrature node dump: x, weight, normal, curvatures.
std::string nodes_csv(const Interface& g);

}  // namespace innervar
