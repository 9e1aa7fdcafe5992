#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "msdiff/common.hpp"

namespace msdiff {

struct QuadratureRule {
  std::vector<double> nodes;    // roots of the order-n Hermite polynomial
  std::vector<double> weights;  // Gauss weights for the weight function exp(-x^2)
};

namespace detail {

// Orthonormal Hermite value at x for degrees 0..n, weight exp(-x^2).
// p[k+1] = x*sqrt(2/(k+1))*p[k] - sqrt(k/(k+1))*p[k-1], p[0] = pi^{-1/4}.
inline void hermite_orthonormal(int n, double x, std::vector<double>& p) {
  p.resize(static_cast<std::size_t>(n) + 1);
  p[0] = std::pow(M_PI, -0.25);
  if (n == 0) return;
  p[1] = x * std::sqrt(2.0) * p[0];
  for (int k = 1; k < n; ++k)
    p[k + 1] = x * std::sqrt(2.0 / (k + 1)) * p[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * p[k - 1];
}

// Number of eigenvalues of the Hermite Jacobi matrix strictly below lambda
// (diagonal 0, off-diagonal beta_k = sqrt(k/2)): negative-pivot count of the
// LDL^T factorization of J - lambda I, d_k = -lambda - beta_{k-1}^2 / d_{k-1}.
inline int sturm_count_below(int n, double lambda) {
  int count = 0;
  double d = -lambda;
  for (int k = 1;; ++k) {
    if (d < 0.0) {
      ++count;
    } else if (d == 0.0) {
      ++count;
      d = -1e-300;
    }
    if (k == n) break;
    const double beta2 = 0.5 * k;
    d = -lambda - beta2 / d;
  }
  return count;
}

}  // namespace detail

// Gauss-Hermite rule: integrates exp(-x^2) * polynomial exactly up to
// degree 2n-1. Nodes from Sturm bisection on the Jacobi matrix followed by
// Newton polishing; weights from the Christoffel function
// w_i = 1 / sum_{k<n} p_k(x_i)^2.
inline QuadratureRule gauss_hermite(int order) {
  require(order >= 2, "quadrature order must be >= 2");
  static std::mutex cache_mutex;
  static std::map<int, QuadratureRule> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }

  const int n = order;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double radius = std::sqrt(2.0 * n + 2.0);

  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    // i-th smallest eigenvalue by bisection on the Sturm count.
    double lo = -radius, hi = radius;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (detail::sturm_count_below(n, mid) <= i)
        lo = mid;
      else
        hi = mid;
    }
    double x = 0.5 * (lo + hi);
    // Newton polish: p_n'(x) = sqrt(2n) p_{n-1}(x).
    for (int it = 0; it < 8; ++it) {
      detail::hermite_orthonormal(n, x, p);
      const double deriv = std::sqrt(2.0 * n) * p[n - 1];
      if (deriv == 0.0) break;
      const double step = p[n] / deriv;
      x -= step;
      if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    detail::hermite_orthonormal(n, x, p);
    double christoffel = 0.0;
    for (int k = 0; k < n; ++k) christoffel += p[k] * p[k];
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / christoffel;
  }

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[order] = rule;
  return rule;
}

struct SpeciesMoments {
  double mass = 0.0;   // integral of f
  Vec3 momentum{};     // integral of v f
  double energy = 0.0; // integral of |v|^2 f
};

// Tensor Gauss-Hermite moments of a pointwise-evaluable velocity density.
// The caller supplies a shift (center) and a per-axis width hint; with a
// Gaussian integrand of exactly that center/width the rule is exact for
// polynomial prefactors up to degree 2*order-1.
template <typename F>
SpeciesMoments moments_numeric(F&& f, int order, const Vec3& shift, double width) {
  require(order >= 2, "quadrature order must be >= 2");
  require(width > 0.0, "quadrature width hint must be positive");
  const QuadratureRule rule = gauss_hermite(order);
  const double scale = width * std::sqrt(2.0);
  const double jac = scale * scale * scale;

  SpeciesMoments m;
  for (int i = 0; i < order; ++i) {
    const double xi = rule.nodes[i];
    for (int j = 0; j < order; ++j) {
      const double xj = rule.nodes[j];
      const double wij = rule.weights[i] * rule.weights[j];
      for (int k = 0; k < order; ++k) {
        const double xk = rule.nodes[k];
        const Vec3 v{shift[0] + scale * xi, shift[1] + scale * xj, shift[2] + scale * xk};
        const double r2 = xi * xi + xj * xj + xk * xk;
        const double w = wij * rule.weights[k] * std::exp(r2) * jac;
        const double fv = f(v);
        const double wf = w * fv;
        m.mass += wf;
        m.momentum += wf * v;
        m.energy += wf * norm2(v);
      }
    }
  }
  return m;
}

// Tensor Gauss-Hermite value of -integral f log(b f) dv with the same
// shift/width hints. Vanishing-density points contribute zero.
template <typename F>
double entropy_integral_numeric(F&& f, double b, int order, const Vec3& shift, double width) {
  require(order >= 2, "quadrature order must be >= 2");
  const QuadratureRule rule = gauss_hermite(order);
  const double scale = width * std::sqrt(2.0);
  const double jac = scale * scale * scale;

  double h = 0.0;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      for (int k = 0; k < order; ++k) {
        const Vec3 v{shift[0] + scale * rule.nodes[i], shift[1] + scale * rule.nodes[j],
                     shift[2] + scale * rule.nodes[k]};
        const double r2 = rule.nodes[i] * rule.nodes[i] + rule.nodes[j] * rule.nodes[j] +
                          rule.nodes[k] * rule.nodes[k];
        const double w = rule.weights[i] * rule.weights[j] * rule.weights[k] * std::exp(r2) * jac;
        const double fv = f(v);
        if (fv > 0.0) h -= w * fv * std::log(b * fv);
      }
  return h;
}

}  // namespace msdiff
