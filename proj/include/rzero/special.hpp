// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "rzero/errors.hpp"

namespace rzero {

/// ln of the Lebesgue measure of the ball B^dim(0, r).
inline double log_ball_volume(int dim, double r) {
  if (dim < 1 || !(r > 0.0)) throw InvalidInput("ball volume needs dim >= 1, r > 0");
  const double half = 0.5 * static_cast<double>(dim);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0) +
         dim * std::log(r);
}

/// |B^dim(0,r)| = pi^{dim/2} r^dim / Gamma(dim/2 + 1).
inline double ball_volume(int dim, double r) {
  if (dim < 1 || !(r > 0.0)) throw InvalidInput("ball volume needs dim >= 1, r > 0");
  const double half = 0.5 * static_cast<double>(dim);
  if (half + 1.0 < 170.0) {
    return std::pow(std::numbers::pi, half) * std::pow(r, dim) /
           std::tgamma(half + 1.0);
  }
  return std::exp(log_ball_volume(dim, r));
}

namespace detail {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
/// Newton iteration on P_n from the Chebyshev initial guess.
inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

inline const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre gl = gauss_legendre(64);
  return gl;
}

}  // namespace detail
}  // namespace rzero
