// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rzero/density.hpp"
#include "rzero/envelope.hpp"
#include "rzero/errors.hpp"
#include "rzero/family.hpp"
#include "rzero/quadrature.hpp"
#include "rzero/zero_density.hpp"

namespace rzero {

enum class BadPointReason {
  F1Zero,
  WronskianSingular,
  GammaPoint,
  SupportEdge,
  KacSingularity
};

inline const char* to_string(BadPointReason r) {
  switch (r) {
    case BadPointReason::F1Zero: return "f1-zero";
    case BadPointReason::WronskianSingular: return "wronskian-singular";
    case BadPointReason::GammaPoint: return "gamma-point";
    case BadPointReason::SupportEdge: return "support-edge";
    case BadPointReason::KacSingularity: return "kac-singularity";
  }
  return "?";
}

struct BadPoint {
  double t;
  BadPointReason reason;
};

struct ExpectationResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::vector<BadPoint> bad_points;
  int xi_count = 0;
  int subintervals = 1;
};

/// Parameters where an assumption backing the density formula fails at a
/// point: zeros of f1, of W_{f1,f2} (and W_{f3,f4} for dim >= 4), envelope
/// inflections for dim 2, degeneracies of D = SQ - P^2, and, when a ball
/// radius is given, crossings of the support edge f0^2 = r^2 S. All are
/// isolated; the integral of H is insensitive to them.
inline std::vector<BadPoint> find_bad_points(
    const BasisFamily& family, const Interval& iv, int grid_points = 1024,
    std::optional<double> ball_radius = std::nullopt) {
  if (grid_points < 64) throw InvalidInput("find_bad_points needs grid >= 64");
  std::vector<BadPoint> bad;
  auto add_all = [&bad](const std::vector<double>& ts, BadPointReason why) {
    for (double t : ts) bad.push_back({t, why});
  };

  auto f1 = [&family](double t) { return family.jet(1, t).value; };
  auto f1_scan = detail::scan_zeros(f1, iv, grid_points);
  if (f1_scan.plateau)
    throw DegenerateFamily("f1 vanishes on a subinterval");
  add_all(f1_scan.zeros, BadPointReason::F1Zero);

  auto w12 = [&family](double t) { return family.wronskian(1, 2, t); };
  auto w12_scan = detail::scan_zeros(w12, iv, grid_points);
  if (w12_scan.plateau)
    throw DegenerateFamily("W_{f1,f2} singular on a subinterval");
  add_all(w12_scan.zeros, BadPointReason::WronskianSingular);

  if (family.dim() >= 4) {
    auto w34 = [&family](double t) { return family.wronskian(3, 4, t); };
    auto w34_scan = detail::scan_zeros(w34, iv, grid_points);
    if (w34_scan.plateau)
      throw DegenerateFamily("W_{f3,f4} singular on a subinterval");
    add_all(w34_scan.zeros, BadPointReason::WronskianSingular);
  }

  if (family.dim() == 2 && w12_scan.zeros.empty()) {
    add_all(find_gamma(family, iv, std::max(grid_points, 4096)),
            BadPointReason::GammaPoint);
  }

  // D >= 0 touches zero where Theorem-level nondegeneracy fails; for Kac
  // families that is the (t^2 - 1) factor of the printed closed form.
  {
    auto dmom = [&family](double t) {
      const Moments m = family.moments(t);
      return m.D / std::max(m.S * m.Q, 1e-300);
    };
    auto d_scan = detail::scan_zeros(dmom, iv, grid_points, 1e-12);
    add_all(d_scan.zeros, BadPointReason::KacSingularity);
    if (family.kind() == FamilyKind::Kac)
      for (double s : {-1.0, 1.0})
        if (iv.contains(s)) bad.push_back({s, BadPointReason::KacSingularity});
  }

  if (ball_radius) {
    const double r2 = *ball_radius * *ball_radius;
    auto edge = [&family, r2](double t) {
      const double f0 = family.jet(0, t).value;
      return f0 * f0 - r2 * family.moments(t).S;
    };
    auto e_scan = detail::scan_zeros(edge, iv, grid_points);
    add_all(e_scan.zeros, BadPointReason::SupportEdge);
  }

  std::sort(bad.begin(), bad.end(),
            [](const BadPoint& a, const BadPoint& b) { return a.t < b.t; });
  // collapse coincident detections, keeping the first reason
  std::vector<BadPoint> out;
  for (const BadPoint& b : bad)
    if (out.empty() || b.t - out.back().t > 1e-10 * std::max(1.0, iv.length()))
      out.push_back(b);
  return out;
}

namespace detail {

struct PiecewiseIntegral {
  double value = 0.0;
  double error = 0.0;
  int pieces = 0;
};

/// Integrates H over the interval minus epsilon-neighborhoods of the bad
/// points. Each neighborhood starts at 1e-6 |Delta| wide and is halved (at
/// most 40 times) until a sup-based bound on its excluded mass drops below
/// its share of rel_tol * value; the bound is charged to the error estimate.
template <class H>
PiecewiseIntegral integrate_with_bad_points(H&& h, const Interval& iv,
                                            const std::vector<double>& bad_ts,
                                            double rel_tol) {
  PiecewiseIntegral out;
  std::vector<double> ts;
  for (double t : bad_ts)
    if (t > iv.lo - 1e-12 && t < iv.hi + 1e-12) ts.push_back(t);
  std::sort(ts.begin(), ts.end());

  const double len = iv.length();
  std::vector<double> eps(ts.size(), 1e-6 * len);

  auto sup_near = [&](std::size_t i) {
    const double t = ts[i], e = eps[i];
    double sup = 0.0;
    for (double probe : {t - 4 * e, t - 2 * e, t - e, t + e, t + 2 * e, t + 4 * e}) {
      if (probe <= iv.lo || probe >= iv.hi) continue;
      bool inside_other = false;
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (j != i && std::abs(probe - ts[j]) < eps[j]) inside_other = true;
      if (!inside_other) sup = std::max(sup, h(probe));
    }
    return sup;
  };

  // rough value first, to scale the neighborhood bound
  double scale_value = 0.0;
  {
    const int n = 64;
    for (int i = 1; i < n; ++i) {
      const double t = iv.lo + len * i / n;
      bool excluded = false;
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (std::abs(t - ts[j]) < eps[j]) excluded = true;
      if (!excluded) scale_value = std::max(scale_value, h(t));
    }
    scale_value *= len;
  }

  double bound_total = 0.0;
  const double budget =
      rel_tol * std::max(scale_value, 1e-12) / std::max<std::size_t>(ts.size(), 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (int halvings = 0; halvings < 40; ++halvings) {
      const double width =
          std::min(iv.hi, ts[i] + eps[i]) - std::max(iv.lo, ts[i] - eps[i]);
      if (sup_near(i) * width <= budget) break;
      eps[i] *= 0.5;
    }
    const double width =
        std::min(iv.hi, ts[i] + eps[i]) - std::max(iv.lo, ts[i] - eps[i]);
    bound_total += sup_near(i) * std::max(width, 0.0);
  }

  // assemble the kept pieces
  std::vector<std::pair<double, double>> pieces;
  double cursor = iv.lo;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double a = ts[i] - eps[i], b = ts[i] + eps[i];
    if (a > cursor) pieces.emplace_back(cursor, a);
    cursor = std::max(cursor, b);
  }
  if (cursor < iv.hi) pieces.emplace_back(cursor, iv.hi);

  for (auto [a, b] : pieces) {
    if (!(a < b)) continue;
    const QuadResult q = integrate_adaptive(
        h, a, b, rel_tol, rel_tol * std::max(scale_value, 1e-12) * 0.1);
    out.value += q.value;
    out.error += q.error;
    ++out.pieces;
  }
  out.error += bound_total;
  if (out.pieces == 0) out.pieces = 1;
  return out;
}

}  // namespace detail

/// E_n(rho, F, Delta): the Xi correction plus the integral of the local
/// density over the interval minus vanishing neighborhoods of the bad points.
/// Gaussian and radial-general models reduce to a radius integral of the
/// uniform-ball expectation.
inline ExpectationResult expected_zeros(const BasisFamily& family,
                                        const DensityModel& model,
                                        const Interval& iv,
                                        double rel_tol = 1e-8) {
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-2))
    throw InvalidInput("rel_tol must lie in [1e-12, 1e-2]");

  ExpectationResult result;
  result.xi_count = xi_correction(family, iv);

  if (model.kind() == DensityKind::UniformBall) {
    const double r = model.radius();
    result.bad_points = find_bad_points(family, iv, 1024, r);
    std::vector<double> ts;
    for (const auto& b : result.bad_points) ts.push_back(b.t);
    auto h = [&](double t) { return h_uniform_ball(family, r, t).value; };
    const auto part = detail::integrate_with_bad_points(h, iv, ts, rel_tol);
    result.value = result.xi_count + part.value;
    result.abs_error_estimate = part.error;
    result.subintervals = part.pieces;
    return result;
  }

  // radius-independent bad points reported once
  result.bad_points = find_bad_points(family, iv, 1024);
  std::vector<double> ts;
  for (const auto& b : result.bad_points) ts.push_back(b.t);

  int pieces = 0;
  double err_inner_max = 0.0;
  auto inner = [&](double radius) {
    auto h = [&](double t) { return h_uniform_ball(family, radius, t).value; };
    std::vector<double> all = ts;
    const double r2 = radius * radius;
    auto edge = [&](double t) {
      const double f0 = family.jet(0, t).value;
      return f0 * f0 - r2 * family.moments(t).S;
    };
    for (double z : detail::scan_zeros(edge, iv, 256).zeros) all.push_back(z);
    const auto part =
        detail::integrate_with_bad_points(h, iv, all, 0.5 * rel_tol);
    pieces = std::max(pieces, part.pieces);
    err_inner_max = std::max(err_inner_max, part.error);
    return part.value;
  };
  const double integral = radial_reduce(inner, family.dim(), model, 0.5 * rel_tol);
  result.value = result.xi_count + integral;
  result.abs_error_estimate =
      err_inner_max + 0.5 * rel_tol * std::abs(integral);
  result.subintervals = pieces;
  return result;
}

}  // namespace rzero
