// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "rzero/errors.hpp"
#include "rzero/quadrature.hpp"
#include "rzero/rng.hpp"
#include "rzero/special.hpp"

namespace rzero {

struct BallGeometry {
  int dim;
  double radius;
  double volume;

  BallGeometry(int dim_, double radius_)
      : dim(dim_), radius(radius_), volume(ball_volume(dim_, radius_)) {}
};

enum class DensityKind { UniformBall, IsotropicGaussian, RadialGeneral };

/// Parameter-vector distribution: uniform on a ball, isotropic Gaussian with
/// per-coordinate variance sigma, or a general radial density
/// rho(x) = integral_{||x||}^{inf} phi(u) du with phi supplied explicitly.
class DensityModel {
 public:
  static DensityModel uniform_ball(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw InvalidInput("uniform ball needs r > 0");
    DensityModel m;
    m.kind_ = DensityKind::UniformBall;
    m.radius_ = r;
    return m;
  }

  static DensityModel gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw InvalidInput("gaussian needs sigma > 0");
    DensityModel m;
    m.kind_ = DensityKind::IsotropicGaussian;
    m.sigma_ = sigma;
    return m;
  }

  /// profile(s) = rho at radius s, phi = -profile'; the structural identity
  /// profile(s) = integral_s^tail phi is checked at 16 radii to 1e-6 relative.
  static DensityModel radial_general(std::function<double(double)> profile,
                                     std::function<double(double)> phi,
                                     double tail_radius) {
    if (!(tail_radius > 0.0) || !profile || !phi)
      throw InvalidInput("radial density needs profile, phi, tail_radius > 0");
    DensityModel m;
    m.kind_ = DensityKind::RadialGeneral;
    m.profile_ = std::move(profile);
    m.phi_ = std::move(phi);
    m.tail_ = tail_radius;
    for (int k = 0; k < 16; ++k) {
      const double s = tail_radius * (k + 0.5) / 16.0;
      const double lhs = m.profile_(s);
      const double rhs =
          integrate_adaptive(m.phi_, s, tail_radius, 1e-10, 1e-300).value;
      if (!(std::abs(lhs - rhs) <= 1e-6 * std::max({std::abs(lhs), std::abs(rhs), 1e-300})))
        throw InvalidDensity("profile is not the tail integral of phi");
    }
    return m;
  }

  DensityKind kind() const { return kind_; }
  double radius() const { return radius_; }
  double sigma() const { return sigma_; }
  double tail_radius() const { return tail_; }

  /// phi of the radial representation. For the Gaussian this is
  /// t e^{-t^2/(2 sigma)} / ((2 pi sigma)^{dim/2} sigma); dim-dependent, so it
  /// is exposed as log-weight below rather than here.
  const std::function<double(double)>& phi() const { return phi_; }
  const std::function<double(double)>& profile() const { return profile_; }

 private:
  DensityModel() = default;
  DensityKind kind_ = DensityKind::UniformBall;
  double radius_ = 1.0;
  double sigma_ = 1.0;
  double tail_ = 0.0;
  std::function<double(double)> profile_;
  std::function<double(double)> phi_;
};

/// Draws parameter vectors for one (model, dim) pair. Construct once per run;
/// the radial-general path tabulates a 4096-node inverse CDF of the ball-radius
/// weight t^dim phi(t) up front, then costs O(log) per sample.
class Sampler {
 public:
  Sampler(const DensityModel& model, int dim) : model_(model), dim_(dim) {
    if (dim < 2) throw InvalidInput("sampling needs dim >= 2");
    if (model.kind() == DensityKind::RadialGeneral) build_radius_table();
  }

  int dim() const { return dim_; }

  void operator()(SampleRng& rng, std::span<double> out) const {
    switch (model_.kind()) {
      case DensityKind::IsotropicGaussian: {
        const double s = std::sqrt(model_.sigma());
        for (auto& v : out) v = s * rng.normal();
        return;
      }
      case DensityKind::UniformBall: {
        fill_ball_point(rng, out, model_.radius());
        return;
      }
      case DensityKind::RadialGeneral: {
        const double t = radius_from_table(rng.uniform01());
        fill_ball_point(rng, out, t);
        return;
      }
    }
  }

  std::vector<double> draw(SampleRng& rng) const {
    std::vector<double> x(dim_);
    (*this)(rng, x);
    return x;
  }

 private:
  void fill_ball_point(SampleRng& rng, std::span<double> out,
                       double ball_radius) const {
    double norm2 = 0.0;
    for (auto& v : out) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double r =
        ball_radius * std::pow(rng.uniform01(), 1.0 / dim_) / std::sqrt(norm2);
    for (auto& v : out) v *= r;
  }

  // x ~ rho decomposes as: ball radius T with density ~ t^dim phi(t), then a
  // uniform point in B(0,T). Tabulated CDF, inverted by bisection + linear
  // interpolation (monotone by construction).
  void build_radius_table() {
    const int n = 4096;
    const double tail = model_.tail_radius();
    radius_nodes_.resize(n + 1);
    radius_cdf_.resize(n + 1);
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double t = tail * i / n;
      radius_nodes_[i] = t;
      w[i] = std::pow(t, dim_) * (i == 0 ? 0.0 : model_.phi()(t));
      if (!std::isfinite(w[i]) || w[i] < 0.0)
        throw InvalidDensity("radius weight t^dim phi(t) must be finite and >= 0");
    }
    radius_cdf_[0] = 0.0;
    for (int i = 1; i <= n; ++i)
      radius_cdf_[i] = radius_cdf_[i - 1] + 0.5 * (w[i - 1] + w[i]);
    const double mass = radius_cdf_[n];
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw InvalidDensity("radius weight is not normalizable");
    for (auto& c : radius_cdf_) c /= mass;
  }

  double radius_from_table(double u) const {
    const auto it =
        std::lower_bound(radius_cdf_.begin(), radius_cdf_.end(), u);
    if (it == radius_cdf_.begin()) return radius_nodes_.front();
    if (it == radius_cdf_.end()) return radius_nodes_.back();
    const std::size_t i = static_cast<std::size_t>(it - radius_cdf_.begin());
    const double c0 = radius_cdf_[i - 1], c1 = radius_cdf_[i];
    const double f = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return radius_nodes_[i - 1] + f * (radius_nodes_[i] - radius_nodes_[i - 1]);
  }

  DensityModel model_;
  int dim_;
  std::vector<double> radius_nodes_;
  std::vector<double> radius_cdf_;
};

/// Convenience one-shot draw.
inline std::vector<double> sample(const DensityModel& model, int dim,
                                  SampleRng& rng) {
  return Sampler(model, dim).draw(rng);
}

/// E_n(rho, F, Delta) = pi^{dim/2}/Gamma(dim/2+1) * integral_0^inf
/// t^dim phi(t) inner(t) dt, where inner(t) is the uniform-ball expectation at
/// ball radius t. Gaussian and general radial models only.
template <class Inner>
double radial_reduce(Inner&& inner, int dim, const DensityModel& model,
                     double rel_tol = 1e-10) {
  if (dim < 2) throw InvalidInput("radial_reduce needs dim >= 2");
  if (model.kind() == DensityKind::IsotropicGaussian) {
    const double sigma = model.sigma();
    // prefactor * t^dim * phi(t) in log space: exp(-lgamma(dim/2+1)
    //   - (dim/2) ln(2 sigma) - ln sigma + (dim+1) ln t - t^2/(2 sigma))
    const double log_pref = -std::lgamma(0.5 * dim + 1.0) -
                            0.5 * dim * std::log(2.0 * sigma) - std::log(sigma);
    const double tail = std::sqrt(sigma) * (std::sqrt(double(dim)) + 12.0);
    auto f = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double logw =
          log_pref + (dim + 1.0) * std::log(t) - t * t / (2.0 * sigma);
      return std::exp(logw) * inner(t);
    };
    return integrate_adaptive(f, 0.0, tail, rel_tol, 1e-14).value;
  }
  if (model.kind() == DensityKind::RadialGeneral) {
    const double pref = std::exp(0.5 * dim * std::log(std::numbers::pi) -
                                 std::lgamma(0.5 * dim + 1.0));
    auto f = [&](double t) {
      if (t <= 0.0) return 0.0;
      return pref * std::pow(t, dim) * model.phi()(t) * inner(t);
    };
    return integrate_adaptive(f, 0.0, model.tail_radius(), rel_tol, 1e-14).value;
  }
  throw InvalidInput("radial_reduce applies to gaussian or radial-general models");
}

}  // namespace rzero
