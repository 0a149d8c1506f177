#pragma once

#include <vector>

namespace evi {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the three-term recurrence).
QuadratureRule gauss_legendre(int points);

/// Rule for E[f(Z)], Z ~ N(0, 1): Gauss-Legendre on [-12, 12] against the
/// normal density, weights renormalized to sum to one.
QuadratureRule standard_normal_rule(int points);

}  // namespace evi
