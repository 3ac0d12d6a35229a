#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "shrinkers/errors.hpp"

namespace shrinkers {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule with `n` nodes on [a, b] (Newton iteration on P_n).
inline Rule1D gaussLegendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gaussLegendre needs at least one node");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
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
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = mid - half * z;
    r.nodes[n - 1 - i] = mid + half * z;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

/// Uniform (trapezoidal) rule for a periodic integrand on [a, a + period).
inline Rule1D periodicTrapezoid(int n, double a, double period) {
  if (n < 1) throw InvalidArgument("periodicTrapezoid needs at least one node");
  Rule1D r;
  const double h = period / n;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(a + i * h);
    r.weights.push_back(h);
  }
  return r;
}

}  // namespace shrinkers
