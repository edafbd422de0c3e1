// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rzero/errors.hpp"
#include "rzero/family.hpp"

namespace rzero {

/// Point of the envelope curve of the line family
/// f0(t) + f1(t) x1 + f2(t) x2 = 0, with its t-derivatives and the second and
/// third derivatives of F along the curve.
struct EnvelopePoint {
  double t;
  double x1, x2;
  double dx1, dx2;
  double s2, s3;
};

enum class Region { E1, E2, E3, E4, E5, E6 };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::E1: return "E1";
    case Region::E2: return "E2";
    case Region::E3: return "E3";
    case Region::E4: return "E4";
    case Region::E5: return "E5";
    case Region::E6: return "E6";
  }
  return "?";
}

struct RegionLabel {
  int count;
  Region region;
};

/// Solves the two-line system for the envelope point at t. The derivatives
/// come from the identities f1 x1' + f2 x2' = 0, f1' x1' + f2' x2' = -s2,
/// valid because F and F_t vanish identically along the curve.
inline EnvelopePoint envelope_point(const BasisFamily& family, double t) {
  if (family.dim() != 2)
    throw InvalidInput("envelope geometry needs a dim-2 family");
  const Jet3 f0 = family.jet(0, t), f1 = family.jet(1, t), f2 = family.jet(2, t);
  const double w = f1.value * f2.d1 - f1.d1 * f2.value;
  const double scale = std::hypot(f1.value, f2.value) * std::hypot(f1.d1, f2.d1);
  if (std::abs(w) <= 1e-13 * std::max(scale, 1e-300))
    throw SingularWronskian("W_{f1,f2} singular at t=" + std::to_string(t));
  EnvelopePoint p;
  p.t = t;
  p.x1 = -(f2.d1 * f0.value - f2.value * f0.d1) / w;
  p.x2 = -(-f1.d1 * f0.value + f1.value * f0.d1) / w;
  p.s2 = f0.d2 + f1.d2 * p.x1 + f2.d2 * p.x2;
  p.s3 = f0.d3 + f1.d3 * p.x1 + f2.d3 * p.x2;
  p.dx1 = f2.value * p.s2 / w;
  p.dx2 = -f1.value * p.s2 / w;
  return p;
}

/// Zeros of s2 in the open interval: the parameters where the envelope
/// changes convexity. Sorted ascending.
inline std::vector<double> find_gamma(const BasisFamily& family,
                                      const Interval& iv,
                                      int grid_points = 4096) {
  auto s2 = [&family](double t) { return envelope_point(family, t).s2; };
  const auto scan = detail::scan_zeros(s2, iv, grid_points, 1e-12);
  if (scan.plateau)
    throw DegenerateGamma("s2 vanishes on a subinterval near t=" +
                          std::to_string(scan.plateau_at));
  std::vector<double> zs;
  for (double z : scan.zeros)
    if (z > iv.lo + 1e-12 && z < iv.hi - 1e-12) zs.push_back(z);
  return zs;
}

/// Slope dx1/dx2 of the envelope at t; the tangent line there is the family
/// line itself.
inline double tangent_slope(const BasisFamily& family, double t) {
  const Jet3 f1 = family.jet(1, t), f2 = family.jet(2, t);
  if (std::abs(f1.value) <= 1e-13 * std::max(std::hypot(f1.value, f2.value), 1e-300))
    throw VerticalTangent("f1 = 0 at t=" + std::to_string(t));
  return -f2.value / f1.value;
}

namespace detail {

struct LineSection {
  double value;  // g(t) = f0 + f1 p1 + f2 p2
  double d1;     // g'(t)
};

inline LineSection line_section(const BasisFamily& family, double t, double p1,
                                double p2) {
  const Jet3 f0 = family.jet(0, t), f1 = family.jet(1, t), f2 = family.jet(2, t);
  return {f0.value + f1.value * p1 + f2.value * p2,
          f0.d1 + f1.d1 * p1 + f2.d1 * p2};
}

struct SectionScan {
  std::vector<double> roots;   // sign-change roots of g
  std::vector<double> touches; // zeros of g at critical points, no sign change
  double scale = 0.0;          // max |g| over the grid
  double min_signed = 0.0;     // min over the grid refinement of sigma * g
  double arg_min = 0.0;
};

/// One pass over g(t) = F(t; p): locates transversal roots by bisection,
/// refines every critical point from the analytic g' to catch tangencies, and
/// tracks the minimum of sigma*g used by the region tests.
inline SectionScan scan_section(const BasisFamily& family, const Interval& iv,
                                double p1, double p2, double sigma, int n,
                                double touch_tol) {
  SectionScan out;
  std::vector<double> ts(n + 1), g(n + 1), dg(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = iv.lo + iv.length() * i / n;
    const LineSection s = line_section(family, ts[i], p1, p2);
    g[i] = s.value;
    dg[i] = s.d1;
    out.scale = std::max(out.scale, std::abs(g[i]));
  }
  out.min_signed = sigma * g[0];
  out.arg_min = ts[0];
  auto note_min = [&](double t, double sg) {
    if (sg < out.min_signed) {
      out.min_signed = sg;
      out.arg_min = t;
    }
  };
  const double zero_band = touch_tol * std::max(out.scale, 1e-300);
  auto gf = [&](double t) { return line_section(family, t, p1, p2).value; };
  auto dgf = [&](double t) { return line_section(family, t, p1, p2).d1; };

  for (int i = 1; i <= n; ++i) {
    note_min(ts[i], sigma * g[i]);
    if ((g[i - 1] < 0.0) != (g[i] < 0.0)) {
      out.roots.push_back(bisect_root(gf, ts[i - 1], ts[i], g[i - 1], g[i]));
    } else if ((dg[i - 1] < 0.0) != (dg[i] < 0.0)) {
      // critical point of g inside the cell: candidate tangency / interior min
      const double tc = bisect_root(dgf, ts[i - 1], ts[i], dg[i - 1], dg[i]);
      const double gc = gf(tc);
      note_min(tc, sigma * gc);
      if (std::abs(gc) <= zero_band) out.touches.push_back(tc);
    }
  }
  if (std::abs(g[0]) <= zero_band) out.touches.push_back(ts[0]);
  if (std::abs(g[n]) <= zero_band) out.touches.push_back(ts[n]);
  return out;
}

inline int cluster_count(std::vector<double>& roots, double tol) {
  std::sort(roots.begin(), roots.end());
  int count = 0;
  double last = -std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r - last > tol) ++count;
    last = r;
  }
  return count;
}

}  // namespace detail

/// Number of distinct t in the interval with F(t; p) = 0: dense grid, sign
/// changes refined by bisection, tangencies caught at critical points of g,
/// clusters within `cluster_tol` merged. For trig families over whole periods
/// a zero at the right endpoint duplicates the one at the left and is merged.
inline int count_tangents(const BasisFamily& family, const Interval& iv,
                          double p1, double p2, int grid_points = 4096,
                          double cluster_tol = 1e-9) {
  if (family.dim() != 2)
    throw InvalidInput("count_tangents needs a dim-2 family");
  const int n = std::max(grid_points, 16);
  auto scan = detail::scan_section(family, iv, p1, p2, 1.0, n, 1e-9);
  std::vector<double> roots = scan.roots;
  roots.insert(roots.end(), scan.touches.begin(), scan.touches.end());
  if (roots.empty()) return 0;
  if (family.kind() == FamilyKind::Trig) {
    const double period = 2.0 * std::numbers::pi;
    const double k = std::round(iv.length() / period);
    if (k >= 1.0 && std::abs(iv.length() - k * period) <= cluster_tol) {
      // a zero at the right endpoint duplicates the one at the left
      bool has_lo = false;
      for (double s : roots)
        if (std::abs(s - iv.lo) <= cluster_tol) has_lo = true;
      if (has_lo)
        std::erase_if(roots, [&](double r) {
          return std::abs(r - iv.hi) <= cluster_tol;
        });
    }
  }
  return detail::cluster_count(roots, cluster_tol);
}

/// Classifies a point against the six regions cut out by the envelope arc and
/// the two end tangent lines, for an inflection-free interval on which f1
/// does not vanish. The count is derived from the region; within the
/// half-plane tolerance band of a boundary it is taken from count_tangents
/// instead of guessed.
inline RegionLabel classify(const BasisFamily& family, const Interval& iv,
                            double p1, double p2, int grid_points = 4096) {
  if (family.dim() != 2)
    throw InvalidInput("classify needs a dim-2 family");
  if (!find_gamma(family, iv).empty())
    throw GammaNonEmpty("interval contains envelope inflection points; split at them");
  {
    auto f1 = [&family](double t) { return family.jet(1, t).value; };
    const auto f1_scan = detail::scan_zeros(f1, iv, grid_points);
    if (!f1_scan.zeros.empty() || f1_scan.plateau)
      throw VerticalTangent("f1 vanishes inside the interval");
  }
  const double mid = 0.5 * (iv.lo + iv.hi);
  const double sigma = envelope_point(family, mid).s2 > 0.0 ? 1.0 : -1.0;

  const int n = std::max(grid_points, 16);
  const auto scan = detail::scan_section(family, iv, p1, p2, sigma, n, 1e-9);
  const double band = 1e-9 * std::max(scan.scale, 1e-300);
  const double vl = sigma * detail::line_section(family, iv.lo, p1, p2).value;
  const double vu = sigma * detail::line_section(family, iv.hi, p1, p2).value;

  auto boundary_count = [&]() {
    return count_tangents(family, iv, p1, p2, grid_points);
  };

  // Strictly beyond both end tangents, away from the curve: no tangent line.
  if (vl < -band && vu < -band) return {0, Region::E1};
  // Within the band of the arc (sigma*g has a near-zero minimum): on E5.
  if (std::abs(scan.min_signed) <= band) return {boundary_count(), Region::E5};
  // Strictly inside the convex body spanned by the arc and its end tangents.
  if (scan.min_signed > band && vl > band && vu > band) return {0, Region::E6};
  // On one of the end tangent lines: boundary of E2/E3.
  if (std::abs(vl) <= band) return {boundary_count(), Region::E2};
  if (std::abs(vu) <= band) return {boundary_count(), Region::E3};
  // Curve side of both end tangents, outside the body: the two-tangent lens.
  if (vl > band && vu > band) return {2, Region::E4};
  // Beyond exactly one end tangent: one tangency inside the interval.
  return {1, vl < -band ? Region::E2 : Region::E3};
}

}  // namespace rzero
