// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "rzero/errors.hpp"

namespace rzero {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long long panels = 0;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (positive half; node 7 is 0).
// Gauss nodes are the odd-indexed Kronrod abscissae.
inline constexpr double kXgk15[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk15[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg7[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  double value;  // K15 estimate
  double err;    // |K15 - G7|
};

template <class F>
Panel eval_panel(F&& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double k15 = kWgk15[7] * f(c);
  double g7 = kWg7[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk15[i];
    const double s = f(c - x) + f(c + x);
    k15 += kWgk15[i] * s;
    if (i % 2 == 1) g7 += kWg7[i / 2] * s;
  }
  Panel p;
  p.lo = lo;
  p.hi = hi;
  p.value = k15 * h;
  p.err = std::abs((k15 - g7) * h);
  if (!std::isfinite(p.value) || !std::isfinite(p.err))
    throw QuadratureFailure("non-finite integrand value in panel");
  return p;
}

// Worst panel first; equal errors break toward the leftmost panel, so the
// refinement order (and hence the result) is deterministic.
struct PanelOrder {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.lo > b.lo;
  }
};

}  // namespace detail

/// Globally adaptive bisection with a G7/K15 pair per panel. Stops when the
/// accumulated pairwise differences drop below max(abs_tol, rel_tol*|value|).
template <class F>
QuadResult integrate_adaptive(F&& f, double lo, double hi, double rel_tol,
                              double abs_tol = 0.0,
                              long long max_panels = 1'000'000) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidInput("integration interval must be finite with lo < hi");
  std::priority_queue<detail::Panel, std::vector<detail::Panel>,
                      detail::PanelOrder>
      queue;
  queue.push(detail::eval_panel(f, lo, hi));
  double value = queue.top().value;
  double err = queue.top().err;
  long long panels = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (panels >= max_panels)
      throw QuadratureFailure("adaptive quadrature exceeded panel budget");
    const detail::Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi))
      break;  // panel narrower than representable; accept current estimate
    const detail::Panel a = detail::eval_panel(f, worst.lo, mid);
    const detail::Panel b = detail::eval_panel(f, mid, worst.hi);
    value += a.value + b.value - worst.value;
    err += a.err + b.err - worst.err;
    queue.push(a);
    queue.push(b);
    ++panels;
  }
  return {value, err, panels};
}

}  // namespace rzero
