#include "innervar/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "innervar/errors.hpp"

namespace innervar {

Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = mid - half * z;
    r.x[n - 1 - i] = mid + half * z;
    r.w[i] = half * w;
    r.w[n - 1 - i] = half * w;
  }
  return r;
}

Rule1D composite_gauss(std::span<const double> breakpoints, int n) {
  Rule1D r;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k + 1] > breakpoints[k])) continue;
    const Rule1D p = gauss_legendre(n, breakpoints[k], breakpoints[k + 1]);
    r.x.insert(r.x.end(), p.x.begin(), p.x.end());
    r.w.insert(r.w.end(), p.w.begin(), p.w.end());
  }
  return r;
}

Rule1D periodic_trapezoid(int n, double a, double b) {
  Rule1D r;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(a + (i + 0.5) * h);
    r.w.push_back(h);
  }
  return r;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

Point BulkRule::point(std::size_t i) const {
  Point p(dim);
  for (int k = 0; k < dim; ++k) p[k] = nodes[i][k];
  return p;
}

void BulkRule::add(const Point& x, double w) {
  std::array<double, kMaxDim> a{};
  for (int k = 0; k < dim; ++k) a[k] = x[k];
  nodes.push_back(a);
  weights.push_back(w);
}

void BulkRule::append(const BulkRule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

BulkRule tensor_rule(std::span<const Rule1D> axes) {
  BulkRule r;
  r.dim = static_cast<int>(axes.size());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  r.nodes.reserve(total);
  r.weights.reserve(total);
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t m = n;
    for (int k = r.dim - 1; k >= 0; --k) {
      idx[k] = m % axes[k].size();
      m /= axes[k].size();
    }
    std::array<double, kMaxDim> x{};
    double w = 1.0;
    for (int k = 0; k < r.dim; ++k) {
      x[k] = axes[k].x[idx[k]];
      w *= axes[k].w[idx[k]];
    }
    r.nodes.push_back(x);
    r.weights.push_back(w);
  }
  return r;
}

namespace {

int initial_jobs() {
  if (const char* env = std::getenv("INNERVAR_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& jobs_setting() {
  static std::atomic<int> value{initial_jobs()};
  return value;
}

}  // namespace

int jobs() { return jobs_setting().load(); }

void set_jobs(int n) { jobs_setting().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs()), (n + 255) / 256);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> integrate_many(const BulkRule& rule, int k,
                                   const std::function<void(const Point&, std::span<double>)>& fn) {
  const std::size_t n = rule.size();
  std::vector<double> values(n * static_cast<std::size_t>(k), 0.0);
  parallel_for(n, [&](std::size_t i) {
    std::array<double, 32> local{};
    if (k > 32) throw Error(ErrorCode::NumericalFailure, "too many simultaneous integrands");
    fn(rule.point(i), std::span<double>(local.data(), k));
    for (int j = 0; j < k; ++j) values[j * n + i] = rule.weights[i] * local[j];
  });
  std::vector<double> sums(k);
  for (int j = 0; j < k; ++j)
    sums[j] = pairwise_sum(std::span<const double>(values.data() + j * n, n));
  return sums;
}

double integrate(const BulkRule& rule, const std::function<double(const Point&)>& fn) {
  return integrate_many(rule, 1, [&](const Point& x, std::span<double> out) { out[0] = fn(x); })[0];
}

}  // namespace innervar
