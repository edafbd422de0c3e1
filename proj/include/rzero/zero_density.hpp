// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rzero/errors.hpp"
#include "rzero/family.hpp"
#include "rzero/special.hpp"

namespace rzero {

enum class HCase { Interior, ChiLow, ChiHigh, Outside, F0Zero };

inline const char* to_string(HCase c) {
  switch (c) {
    case HCase::Interior: return "interior";
    case HCase::ChiLow: return "chi-low";
    case HCase::ChiHigh: return "chi-high";
    case HCase::Outside: return "outside";
    case HCase::F0Zero: return "f0-zero";
  }
  return "?";
}

struct HDiag {
  double S = 0, P = 0, Q = 0, D = 0;
  double a = 0, chi = 0, alpha = 0, beta = 0;
};

/// Local expected-zero density at one t, with the quantities it was built
/// from. value integrates over t to the expected zero count.
struct HDensityPoint {
  double t = 0;
  double value = 0;
  HCase hcase = HCase::Interior;
  HDiag diag;
};

namespace detail {

// J0(z) = int_0^z (1-u^2)^p du for p = (dim-2)/2, via the reduction
// I_p = [z(1-z^2)^p + 2p I_{p-1}] / (2p+1); exact down to p = 0 or 1/2.
inline double kernel_j0_closed(double z, int dim) {
  const int twice_p = dim - 2;
  if (twice_p == 0) return z;
  if (twice_p == 1) {
    const double w = std::sqrt(std::max(0.0, 1.0 - z * z));
    return 0.5 * (z * w + std::asin(std::clamp(z, -1.0, 1.0)));
  }
  const double p = 0.5 * twice_p;
  const double pw = std::pow(std::max(0.0, 1.0 - z * z), p);
  return (z * pw + 2.0 * p * kernel_j0_closed(z, dim - 2)) / (2.0 * p + 1.0);
}

inline double kernel_j0(double z, int dim) {
  if (dim <= 8) return kernel_j0_closed(z, dim);
  // Gauss-Legendre on [0, z]: the integrand is analytic away from u = +-1,
  // and |z| < 1 whenever this branch is taken with a split point inside.
  const double p = 0.5 * (dim - 2);
  const auto& gl = gauss_legendre_64();
  double acc = 0.0;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const double u = 0.5 * z * (gl.nodes[k] + 1.0);
    acc += gl.weights[k] * std::pow(std::max(0.0, 1.0 - u * u), p);
  }
  return acc * 0.5 * z;
}

// J0(1) = sqrt(pi) Gamma(p+1) / (2 Gamma(p+3/2)), any p >= 0.
inline double kernel_j0_at_one(int dim) {
  const double p = 0.5 * (dim - 2);
  return 0.5 * std::sqrt(std::numbers::pi) *
         std::exp(std::lgamma(p + 1.0) - std::lgamma(p + 1.5));
}

// B(c) = int_{-1}^{1} (1-u^2)^p |u - c| du.
inline double kernel_abs_moment(double c, int dim) {
  const double p = 0.5 * (dim - 2);
  if (std::abs(c) >= 1.0) return 2.0 * std::abs(c) * kernel_j0_at_one(dim);
  const double j1 = (1.0 - std::pow(1.0 - c * c, p + 1.0)) / (2.0 * (p + 1.0));
  return 2.0 * c * kernel_j0(c, dim) - 2.0 * j1 + 1.0 / (p + 1.0);
}

}  // namespace detail

/// int_{-R}^{R} h(a, x2) |x2 - chi| dx2 with R = sqrt(r^2 - a^2) and
/// h(a, x2) = pi^{(dim-2)/2}/Gamma(dim/2) (r^2 - a^2 - x2^2)^{(dim-2)/2}.
/// Closed antiderivatives up to dim 8, 64-node Gauss-Legendre per side above.
inline double wedge_inner_integral(double a, double chi, double r, int dim) {
  if (!(std::abs(a) < r)) throw InvalidInput("wedge integral needs |a| < r");
  if (dim < 2) throw InvalidInput("wedge integral needs dim >= 2");
  const double R = std::sqrt((r - a) * (r + a));
  const double C =
      dim < 300 ? std::pow(std::numbers::pi, 0.5 * (dim - 2)) /
                      std::tgamma(0.5 * dim)
                : std::exp(0.5 * (dim - 2) * std::log(std::numbers::pi) -
                           std::lgamma(0.5 * dim));
  return C * std::pow(R, dim - 1) * detail::kernel_abs_moment(chi / R, dim);
}

/// H_{rho_r, F}(t) for x uniform on B^dim(0, r): the single expression
///   (1/|B|) int_{-R}^{R} h(a, x2) |alpha x2 - beta| dx2,
/// which is non-negative by construction, reduces to the interior case when
/// the linear factor changes sign inside the support, to the |beta| form when
/// it does not, and to sqrt(D)/(pi S) when f0 vanishes identically.
inline HDensityPoint h_uniform_ball(const BasisFamily& family, double r,
                                    double t) {
  if (!(r > 0.0) || !std::isfinite(t))
    throw InvalidInput("h_uniform_ball needs r > 0 and finite t");
  const int m = family.dim();
  const Moments mom = family.moments(t);
  if (!(mom.S > 0.0))
    throw DegenerateFamily("all coefficient functions vanish at t");
  const Jet3 f0 = family.jet(0, t);

  HDensityPoint out;
  out.t = t;
  out.diag.S = mom.S;
  out.diag.P = mom.P;
  out.diag.Q = mom.Q;
  out.diag.D = mom.D;
  const double sqrt_s = std::sqrt(mom.S);
  const double a = f0.value / sqrt_s;
  out.diag.a = a;
  const double alpha = std::sqrt(mom.D) / mom.S;
  const double beta = -(f0.d1 * mom.S - f0.value * mom.P) / (mom.S * sqrt_s);
  out.diag.alpha = alpha;
  out.diag.beta = beta;
  const bool degenerate_d = mom.D <= 1e-13 * mom.S * mom.Q;
  out.diag.chi = degenerate_d ? std::numeric_limits<double>::quiet_NaN()
                              : beta / alpha;

  if (std::abs(a) >= r) {
    out.hcase = HCase::Outside;
    out.value = 0.0;
    return out;
  }

  const double R = std::sqrt((r - a) * (r + a));
  // value = C R^{m-1} K / |B| with C/|B| = (m/2)/(pi r^m); K in scaled coords.
  double K;
  if (degenerate_d || std::abs(beta) >= alpha * R) {
    K = 2.0 * std::abs(beta) * detail::kernel_j0_at_one(m);
  } else {
    K = alpha * R * detail::kernel_abs_moment(beta / (alpha * R), m);
  }
  out.value = 0.5 * m / std::numbers::pi * std::pow(R / r, m - 1) * K / r;

  if (f0.value == 0.0 && f0.d1 == 0.0) {
    out.hcase = HCase::F0Zero;
  } else if (degenerate_d) {
    out.hcase = beta < 0.0 ? HCase::ChiLow : HCase::ChiHigh;
  } else if (out.diag.chi <= -R) {
    out.hcase = HCase::ChiLow;
  } else if (out.diag.chi >= R) {
    out.hcase = HCase::ChiHigh;
  } else {
    out.hcase = HCase::Interior;
  }
  return out;
}

namespace detail {

inline double kac_density_closed(int n, double t) {
  const double t2 = t * t;
  const double t2n = std::pow(t, 2 * n);
  const double t2n2 = std::pow(t, 2 * n - 2);
  const double num = (t2n - 1.0) * (t2n - 1.0) -
                     double(n) * n * t2n2 * (t2 - 1.0) * (t2 - 1.0);
  return std::sqrt(std::max(0.0, num)) / ((t2 - 1.0) * (t2n - 1.0)) /
         std::numbers::pi;
}

}  // namespace detail

/// Zero density of the degree-(n-1) random polynomial with isotropic
/// coefficients. The printed closed form has a removable singularity at
/// |t| = 1 where it loses all precision to cancellation; inside a band of
/// width 1e-3 the exact limit sqrt((n^2-1)/12)/pi is used with a first-order
/// blend to the closed form at the band edge.
inline double kac_density(int n, double t) {
  if (n < 2) throw InvalidInput("kac density needs n >= 2");
  const double band = 1e-3;
  const double delta = std::abs(t) - 1.0;
  if (std::abs(delta) < band) {
    const double lim =
        std::sqrt((double(n) * n - 1.0) / 12.0) / std::numbers::pi;
    if (delta == 0.0) return lim;
    const double edge = 1.0 + (delta > 0.0 ? band : -band);
    return lim + std::abs(delta) / band * (detail::kac_density_closed(n, edge) - lim);
  }
  return detail::kac_density_closed(n, t);
}

/// E over [0, 2pi] for f0 = d, basis {cos kt, sin kt}_{k<=n}, x uniform on
/// B^{2n}(0, r): 2 sqrt((n+1)(2n+1)/6) (r^2 - d^2/n)^n / r^{2n}, zero once
/// |d|/sqrt(n) >= r.
inline double trig_expectation_uniform(int n, double d, double r) {
  if (n < 1 || !(r > 0.0)) throw InvalidInput("needs n >= 1, r > 0");
  const double a2 = d * d / n;
  if (a2 >= r * r) return 0.0;
  return 2.0 * std::sqrt((n + 1.0) * (2.0 * n + 1.0) / 6.0) *
         std::pow(1.0 - a2 / (r * r), n);
}

/// Same family under the isotropic Gaussian with per-coordinate variance
/// sigma: 2 sqrt((n+1)(2n+1)/6) e^{-d^2/(2 sigma n)}.
inline double trig_expectation_gaussian(int n, double d, double sigma) {
  if (n < 1 || !(sigma > 0.0)) throw InvalidInput("needs n >= 1, sigma > 0");
  return 2.0 * std::sqrt((n + 1.0) * (2.0 * n + 1.0) / 6.0) *
         std::exp(-d * d / (2.0 * sigma * n));
}

}  // namespace rzero
