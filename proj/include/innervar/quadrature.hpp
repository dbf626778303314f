#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "innervar/field.hpp"

namespace innervar {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);
/// Gauss-Legendre with n points on every panel between consecutive breakpoints.
Rule1D composite_gauss(std::span<const double> breakpoints, int n);
/// Equal-weight rule for periodic integrands on [a, b).
Rule1D periodic_trapezoid(int n, double a, double b);

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Bulk quadrature: nodes in R^dim with weights.
struct BulkRule {
  int dim = 0;
  std::vector<std::array<double, kMaxDim>> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  Point point(std::size_t i) const;
  void add(const Point& x, double w);
  void append(const BulkRule& other);
};

/// Tensor product of one-dimensional rules, one per axis.
BulkRule tensor_rule(std::span<const Rule1D> axes);

/// Worker count used by the node-parallel loops. Initialized from
/// INNERVAR_JOBS when set, otherwise the hardware concurrency.
int jobs();
void set_jobs(int n);

/// Run body(i) for i in [0, n) across jobs() threads in contiguous blocks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Integrate `k` integrands at once: fn(x, out) writes k values at node x.
/// Per-node values are stored and reduced pairwise, so the result does not
/// depend on the worker count.
std::vector<double> integrate_many(const BulkRule& rule, int k,
                                   const std::function<void(const Point&, std::span<double>)>& fn);
double integrate(const BulkRule& rule, const std::function<double(const Point&)>& fn);

}  // namespace innervar
