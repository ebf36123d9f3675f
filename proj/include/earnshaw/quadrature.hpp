#pragma once

#include <span>
#include <vector>

namespace earnshaw::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Nodes are ascending.
Rule gauss_legendre(int n, double a, double b);

/// n-point rule for int_0^inf f(kappa) dkappa via kappa = scale * (1 - t) / t,
/// t in (0, 1). Weights include the Jacobian scale / t^2.
Rule semi_infinite(int n, double scale);

/// Pairwise (cascade) summation; the result does not depend on evaluation
/// order of the inputs, only on their order in the span.
double pairwise_sum(std::span<const double> values);

}  // namespace earnshaw::quadrature
