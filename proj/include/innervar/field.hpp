#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "innervar/jet.hpp"

namespace innervar {

inline constexpr int kMaxComponents = 3;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using SmallMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using JetArray = std::array<Jet, kMaxComponents>;

struct Box {
  Point lo;
  Point hi;
  bool contains(const Point& x) const;
};

/// Implementation interface behind Field. Subclasses override at least one
/// of `apply` (evaluation on jet-valued coordinates) or `at` (evaluation at a
/// point with the coordinates as independent variables); each default is
/// written in terms of the other.
class FieldImpl {
 public:
  FieldImpl(int dim, int components) : dim_(dim), components_(components) {}
  virtual ~FieldImpl() = default;

  virtual void apply(std::span<const Jet> x, std::span<Jet> out) const;
  virtual void at(const Point& x, int order, std::span<Jet> out) const;

  int dim() const { return dim_; }
  int components() const { return components_; }
  const std::optional<Box>& support() const { return support_; }
  void set_support(std::optional<Box> box) { support_ = std::move(box); }

 private:
  int dim_;
  int components_;
  std::optional<Box> support_;
};

/// Immutable smooth map R^dim -> R^components with derivatives to third order.
/// Copies share the underlying expression.
class Field {
 public:
  Field() = default;
  explicit Field(std::shared_ptr<const FieldImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  int dim() const { return impl_->dim(); }
  int components() const { return impl_->components(); }
  const std::optional<Box>& support() const { return impl_->support(); }
  bool compactly_supported() const { return impl_->support().has_value(); }

  void apply(std::span<const Jet> x, std::span<Jet> out) const { impl_->apply(x, out); }
  JetArray apply(std::span<const Jet> x) const;
  JetArray at(const Point& x, int order) const;

  double value(const Point& x) const;
  Point values(const Point& x) const;
  Point gradient(const Point& x) const;
  SmallMat hessian(const Point& x) const;
  /// jacobian(x)(i, j) = d eta^i / d x_j
  SmallMat jacobian(const Point& x) const;
  /// second_derivatives(x)[i](j, k) = d^2 eta^i / dx_j dx_k, symmetrized in (j, k)
  std::array<SmallMat, kMaxComponents> second_derivatives(const Point& x) const;

  const FieldImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const FieldImpl> impl_;
};

using ScalarField = Field;
using VectorField = Field;

/// Seed the coordinate jets x_0..x_{dim-1} at `x`.
std::array<Jet, kMaxDim> seed(const Point& x, int order);

Point make_point(std::initializer_list<double> values);

namespace fields {

struct Monomial {
  double coef = 0.0;
  std::array<int, kMaxDim> power{};
};

struct TrigTerm {
  double coef = 0.0;
  std::array<double, kMaxDim> k{};
  double phase = 0.0;
};

Field constant(int dim, const Point& value);
Field zero(int dim, int components);
/// x -> A x + b
Field linear(const SmallMat& a, const Point& b);
Field dilation(int dim, double a);
/// omega x (x2, -x1) in R^2
Field rotation2d(double omega);
/// omega cross x in R^3
Field rotation3d(const Point& omega);
/// The coordinate field x -> x_i.
Field coordinate(int dim, int i);
Field polynomial(int dim, std::vector<std::vector<Monomial>> components,
                 std::optional<Point> center = std::nullopt);
Field trigonometric(int dim, std::vector<std::vector<TrigTerm>> components);
/// e * exp(-1 / (1 - r^2 / radius^2)) with r measured over the masked axes;
/// equals 1 at the center and vanishes for r >= radius.
Field radial_bump(int dim, const Point& center, double radius,
                  std::array<bool, kMaxDim> axes = {true, true, true});
/// Smooth plateau in r^2 over the masked axes: 1 for r <= inner, 0 for r >= outer.
Field plateau(int dim, const Point& center, double inner, double outer,
              std::array<bool, kMaxDim> axes = {true, true, true});

Field scaled(const Field& f, double c);
Field sum(const Field& a, const Field& b);
Field difference(const Field& a, const Field& b);
/// Scalar field times a field (componentwise).
Field product(const Field& scalar, const Field& f);
/// Stack scalar fields into one vector field.
Field stack(const std::vector<Field>& components);
/// outer(inner(x)) with inner : R^dim -> R^k and outer : R^k -> R^m.
Field compose(const Field& outer, const Field& inner);

/// Field from a plain closure; derivatives (to second order) by central
/// differences with steps eps^(1/3) and eps^(1/4) scaled by max(1, |x|).
Field from_closure(int dim, int components,
                   std::function<void(const Point&, std::span<double>)> fn);

}  // namespace fields

}  // namespace innervar
