#include "earnshaw/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "earnshaw/errors.hpp"

namespace earnshaw::quadrature {

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("quadrature needs at least one node");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = mid - half * z;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half * z;
    r.weights[static_cast<std::size_t>(i)] = half * w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = half * w;
  }
  return r;
}

Rule semi_infinite(int n, double scale) {
  if (!(scale > 0.0)) throw DomainError("semi-infinite rule needs a positive scale");
  const Rule t = gauss_legendre(n, 0.0, 1.0);
  Rule r;
  r.nodes.resize(t.nodes.size());
  r.weights.resize(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double ti = t.nodes[i];
    r.nodes[i] = scale * (1.0 - ti) / ti;
    r.weights[i] = t.weights[i] * scale / (ti * ti);
  }
  return r;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace earnshaw::quadrature
