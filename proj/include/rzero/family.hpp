// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rzero/errors.hpp"
#include "rzero/jet.hpp"

namespace rzero {

/// Compact parameter interval [lo, hi].
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
      throw InvalidInput("interval needs finite lo < hi");
  }
  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

enum class FamilyKind { Trig, Kac, Custom };

/// Power sums of the coefficient functions at one t:
///   S = sum f_i^2, P = sum f_i f_i', Q = sum f_i'^2, D = S Q - P^2.
/// D is clamped at 0 (Cauchy-Schwarz).
struct Moments {
  double S = 0.0;
  double P = 0.0;
  double Q = 0.0;
  double D = 0.0;
};

namespace detail {

struct BasisImpl {
  virtual ~BasisImpl() = default;
  virtual int dim() const = 0;
  virtual FamilyKind kind() const = 0;
  virtual Jet3 jet(int i, double t) const = 0;
  // f0(t) + sum x_i f_i(t); overridden where a recurrence beats per-i jets.
  virtual double eval(std::span<const double> x, double t) const {
    double acc = jet(0, t).value;
    for (int i = 1; i <= dim(); ++i) acc += x[i - 1] * jet(i, t).value;
    return acc;
  }
};

struct TrigBasis final : BasisImpl {
  int harmonics;
  double offset;
  TrigBasis(int n, double d) : harmonics(n), offset(d) {}
  int dim() const override { return 2 * harmonics; }
  FamilyKind kind() const override { return FamilyKind::Trig; }
  Jet3 jet(int i, double t) const override {
    if (i == 0) return {offset, 0.0, 0.0, 0.0};
    const int k = (i + 1) / 2;
    const double kd = static_cast<double>(k);
    const double c = std::cos(kd * t), s = std::sin(kd * t);
    if (i % 2 == 1)  // f_{2k-1} = cos(kt)
      return {c, -kd * s, -kd * kd * c, kd * kd * kd * s};
    return {s, kd * c, -kd * kd * s, -kd * kd * kd * c};
  }
  double eval(std::span<const double> x, double t) const override {
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = c1, sk = s1;
    double acc = offset;
    for (int k = 1; k <= harmonics; ++k) {
      acc += x[2 * k - 2] * ck + x[2 * k - 1] * sk;
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    return acc;
  }
};

struct KacBasis final : BasisImpl {
  int degree;  // number of monomials 1, t, ..., t^{degree-1}
  double offset;
  KacBasis(int n, double d) : degree(n), offset(d) {}
  int dim() const override { return degree; }
  FamilyKind kind() const override { return FamilyKind::Kac; }
  Jet3 jet(int i, double t) const override {
    if (i == 0) return {offset, 0.0, 0.0, 0.0};
    const int p = i - 1;  // f_i = t^p
    auto mono = [t](int e) { return e < 0 ? 0.0 : std::pow(t, e); };
    const double c1 = p, c2 = c1 * (p - 1), c3 = c2 * (p - 2);
    return {mono(p), c1 * mono(p - 1), c2 * mono(p - 2), c3 * mono(p - 3)};
  }
  double eval(std::span<const double> x, double t) const override {
    double acc = x[degree - 1];
    for (int k = degree - 2; k >= 0; --k) acc = acc * t + x[k];
    return acc + offset;
  }
};

// Evaluate a polynomial (ascending coefficients) and three derivatives.
inline Jet3 poly_jet(const std::vector<double>& c, double t) {
  double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    p3 = p3 * t + p2;
    p2 = p2 * t + p1;
    p1 = p1 * t + p0;
    p0 = p0 * t + *it;
  }
  return {p0, p1, 2.0 * p2, 6.0 * p3};
}

struct PolyBasis final : BasisImpl {
  std::vector<std::vector<double>> table;  // row i = coefficients of f_i
  explicit PolyBasis(std::vector<std::vector<double>> rows)
      : table(std::move(rows)) {}
  int dim() const override { return static_cast<int>(table.size()) - 1; }
  FamilyKind kind() const override { return FamilyKind::Custom; }
  Jet3 jet(int i, double t) const override { return poly_jet(table[i], t); }
};

struct CallableBasis final : BasisImpl {
  int n;
  std::function<Jet3(int, double)> fn;
  CallableBasis(int dim_, std::function<Jet3(int, double)> f)
      : n(dim_), fn(std::move(f)) {}
  int dim() const override { return n; }
  FamilyKind kind() const override { return FamilyKind::Custom; }
  Jet3 jet(int i, double t) const override { return fn(i, t); }
};

}  // namespace detail

/// The function family F(t;x) = f0(t) + sum_{i=1}^{dim} x_i f_i(t), with
/// derivative jets of every basis function to order 3. Immutable; all
/// operations are pure functions of their arguments.
class BasisFamily {
 public:
  static BasisFamily trig(int harmonics, double offset) {
    if (harmonics < 1) throw InvalidInput("trig family needs >= 1 harmonic");
    return BasisFamily(std::make_shared<detail::TrigBasis>(harmonics, offset));
  }

  static BasisFamily kac(int degree, double offset) {
    if (degree < 2) throw InvalidInput("kac family needs degree >= 2 (dim >= 2)");
    return BasisFamily(std::make_shared<detail::KacBasis>(degree, offset));
  }

  /// Rows of polynomial coefficients (ascending); row 0 is f0.
  static BasisFamily custom_poly(std::vector<std::vector<double>> table) {
    if (table.size() < 3)
      throw InvalidInput("custom table needs f0 plus at least two basis rows");
    for (auto& row : table)
      if (row.empty()) row.push_back(0.0);
    return BasisFamily(std::make_shared<detail::PolyBasis>(std::move(table)));
  }

  static BasisFamily custom(int dim, std::function<Jet3(int, double)> jets) {
    if (dim < 2) throw InvalidInput("family needs dim >= 2");
    return BasisFamily(std::make_shared<detail::CallableBasis>(dim, std::move(jets)));
  }

  int dim() const { return impl_->dim(); }
  FamilyKind kind() const { return impl_->kind(); }

  Jet3 jet(int i, double t) const {
    if (i < 0 || i > dim()) throw InvalidInput("basis index out of range");
    return impl_->jet(i, t);
  }

  /// F(t;x). x must have exactly dim() entries.
  double eval(std::span<const double> x, double t) const {
    if (static_cast<int>(x.size()) != dim())
      throw InvalidInput("parameter vector length != family dim");
    return impl_->eval(x, t);
  }

  /// d/dt F(t;x) from the first-derivative jets.
  double eval_dt(std::span<const double> x, double t) const {
    if (static_cast<int>(x.size()) != dim())
      throw InvalidInput("parameter vector length != family dim");
    double acc = impl_->jet(0, t).d1;
    for (int i = 1; i <= dim(); ++i) acc += x[i - 1] * impl_->jet(i, t).d1;
    return acc;
  }

  Moments moments(double t) const {
    Moments m;
    for (int i = 1; i <= dim(); ++i) {
      const Jet3 f = impl_->jet(i, t);
      m.S += f.value * f.value;
      m.P += f.value * f.d1;
      m.Q += f.d1 * f.d1;
    }
    m.D = std::max(0.0, m.S * m.Q - m.P * m.P);
    return m;
  }

  /// W_{fi,fj}(t) = f_i f_j' - f_i' f_j, 1 <= i < j <= dim.
  double wronskian(int i, int j, double t) const {
    if (i < 1 || j <= i || j > dim())
      throw InvalidInput("wronskian needs 1 <= i < j <= dim");
    const Jet3 a = impl_->jet(i, t), b = impl_->jet(j, t);
    return a.value * b.d1 - a.d1 * b.value;
  }

  /// Exposes the polynomial table when the family is polynomial in t
  /// (Kac or custom table); nullptr otherwise. Used by the exact root counters.
  const std::vector<std::vector<double>>* poly_table() const {
    if (auto* p = dynamic_cast<const detail::PolyBasis*>(impl_.get()))
      return &p->table;
    return nullptr;
  }

  /// Kac families are polynomial too; materialize coefficients of F(.;x).
  /// Returns false when the family has no polynomial representation.
  bool poly_coefficients(std::span<const double> x,
                         std::vector<double>& out) const {
    if (auto* k = dynamic_cast<const detail::KacBasis*>(impl_.get())) {
      out.assign(x.begin(), x.end());
      out[0] += k->offset;
      return true;
    }
    if (auto* p = dynamic_cast<const detail::PolyBasis*>(impl_.get())) {
      std::size_t deg = 0;
      for (const auto& row : p->table) deg = std::max(deg, row.size());
      out.assign(deg, 0.0);
      for (std::size_t c = 0; c < p->table[0].size(); ++c)
        out[c] += p->table[0][c];
      for (int i = 1; i <= dim(); ++i)
        for (std::size_t c = 0; c < p->table[i].size(); ++c)
          out[c] += x[i - 1] * p->table[i][c];
      return true;
    }
    return false;
  }

  double trig_offset() const {
    if (auto* t = dynamic_cast<const detail::TrigBasis*>(impl_.get()))
      return t->offset;
    if (auto* k = dynamic_cast<const detail::KacBasis*>(impl_.get()))
      return k->offset;
    throw InvalidInput("offset only defined for trig/kac families");
  }

  int harmonics() const {
    if (auto* t = dynamic_cast<const detail::TrigBasis*>(impl_.get()))
      return t->harmonics;
    throw InvalidInput("harmonics only defined for trig families");
  }

 private:
  explicit BasisFamily(std::shared_ptr<const detail::BasisImpl> impl)
      : impl_(std::move(impl)) {
    if (impl_->dim() < 2) throw InvalidInput("family needs dim >= 2");
  }
  std::shared_ptr<const detail::BasisImpl> impl_;
};

struct AssumptionViolation {
  double t;
  std::string assumption;
};

struct AssumptionReport {
  bool sum_squares_positive = true;
  bool wronskian12_ok = true;
  bool wronskian34_ok = true;
  int f1_zero_count = 0;
  std::vector<double> gamma_candidates;
  std::vector<AssumptionViolation> violations;
};

namespace detail {

inline double bisect_root(const std::function<double(double)>& f, double a,
                          double b, double fa, double fb) {
  for (int it = 0; it < 80 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  (void)fb;
  return 0.5 * (a + b);
}

/// Golden-section refinement of a local minimum bracketed by [a, b].
inline double refine_minimum(const std::function<double(double)>& f, double a,
                             double b) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

struct ZeroScan {
  std::vector<double> zeros;     // isolated zeros (sign changes and touches)
  bool plateau = false;          // consecutive grid nodes at zero
  double plateau_at = 0.0;
};

/// Locate zeros of a scalar function on a uniform grid with bisection
/// refinement at sign changes; touch zeros (no sign change) are caught by
/// refining local minima of |f| below `touch_tol` * scale.
inline ZeroScan scan_zeros(const std::function<double(double)>& f,
                           const Interval& iv, int grid_points,
                           double touch_tol = 1e-11) {
  ZeroScan out;
  const int n = std::max(grid_points, 2);
  std::vector<double> ts(n + 1), vs(n + 1);
  double scale = 0.0;
  for (int i = 0; i <= n; ++i) {
    ts[i] = iv.lo + iv.length() * i / n;
    vs[i] = f(ts[i]);
    scale = std::max(scale, std::abs(vs[i]));
  }
  const double zero_band = touch_tol * std::max(scale, 1e-300);
  int consecutive_zero = 0;
  auto push = [&out](double t) {
    if (out.zeros.empty() || t - out.zeros.back() > 1e-10)
      out.zeros.push_back(t);
  };
  for (int i = 0; i <= n; ++i) {
    if (std::abs(vs[i]) <= zero_band) {
      ++consecutive_zero;
      if (consecutive_zero >= 2) {
        out.plateau = true;
        out.plateau_at = ts[i];
      }
      push(ts[i]);
      continue;
    }
    consecutive_zero = 0;
    if (i > 0 && std::abs(vs[i - 1]) > zero_band &&
        (vs[i - 1] < 0.0) != (vs[i] < 0.0)) {
      push(bisect_root(f, ts[i - 1], ts[i], vs[i - 1], vs[i]));
    }
    // interior dip of |f| toward zero without sign change
    if (i >= 2 && std::abs(vs[i - 1]) < std::abs(vs[i - 2]) &&
        std::abs(vs[i - 1]) < std::abs(vs[i]) &&
        (vs[i - 2] < 0.0) == (vs[i] < 0.0)) {
      auto af = [&f](double t) { return std::abs(f(t)); };
      const double tm = refine_minimum(af, ts[i - 2], ts[i]);
      if (std::abs(f(tm)) <= zero_band) push(tm);
    }
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  return out;
}

}  // namespace detail

/// Count of t in Xi = {t : sum f_i(t)^2 = 0} with f0(t) = 0; these points
/// contribute one zero each for almost every x.
inline int xi_correction(const BasisFamily& family, const Interval& iv,
                         int grid_points = 1024) {
  const int n = std::max(grid_points, 2);
  auto S = [&family](double t) { return family.moments(t).S; };
  double max_s = 0.0;
  for (int i = 0; i <= n; ++i)
    max_s = std::max(max_s, S(iv.lo + iv.length() * i / n));
  if (max_s <= 0.0)
    throw DegenerateFamily("sum of squares vanishes identically");
  const double thresh = 1e-14 * max_s;

  // S >= 0, so zeros are minima: refine every interior dip and the endpoints.
  std::vector<double> xi_points;
  auto consider = [&](double t) {
    if (S(t) < thresh &&
        (xi_points.empty() || t - xi_points.back() > 1e-10 * iv.length()))
      xi_points.push_back(t);
  };
  const double dip_gate = 1e-3 * max_s;
  double prev2 = S(iv.lo), prev1 = S(iv.lo + iv.length() / n);
  int below = (prev2 < thresh ? 1 : 0) + (prev1 < thresh ? 1 : 0);
  if (below >= 2)
    throw DegenerateFamily("sum of squares vanishes on a subinterval");
  consider(iv.lo);
  for (int i = 2; i <= n; ++i) {
    const double ti = iv.lo + iv.length() * i / n;
    const double vi = S(ti);
    if (vi < thresh) {
      if (++below >= 2)
        throw DegenerateFamily("sum of squares vanishes on a subinterval");
    } else {
      below = 0;
    }
    if (prev1 <= prev2 && prev1 <= vi && prev1 < dip_gate) {
      const double tm = detail::refine_minimum(
          S, iv.lo + iv.length() * (i - 2) / n, ti);
      consider(tm);
    }
    prev2 = prev1;
    prev1 = vi;
  }
  consider(iv.hi);

  int count = 0;
  for (double t : xi_points)
    if (std::abs(family.jet(0, t).value) <= 1e-9) ++count;
  return count;
}

/// Grid check of the standing assumptions: positivity of sum f_i^2,
/// finiteness of zeros of f1, nonsingular W_{f1,f2} (and W_{f3,f4} when
/// dim >= 4). The report carries counts and violation points; judgement on
/// "finitely many" is the caller's.
inline AssumptionReport validate(const BasisFamily& family, const Interval& iv,
                                 int grid_points = 1024) {
  if (grid_points < 2) throw InvalidInput("validate needs grid_points >= 2");
  AssumptionReport report;

  auto S = [&family](double t) { return family.moments(t).S; };
  const auto s_scan = detail::scan_zeros(S, iv, grid_points, 1e-14);
  if (!s_scan.zeros.empty() || s_scan.plateau) {
    report.sum_squares_positive = false;
    for (double t : s_scan.zeros)
      report.violations.push_back({t, "sum-of-squares-zero"});
    if (s_scan.plateau)
      report.violations.push_back({s_scan.plateau_at, "sum-of-squares-plateau"});
  }

  auto f1 = [&family](double t) { return family.jet(1, t).value; };
  const auto f1_scan = detail::scan_zeros(f1, iv, grid_points);
  report.f1_zero_count = static_cast<int>(f1_scan.zeros.size());
  if (f1_scan.plateau)
    report.violations.push_back({f1_scan.plateau_at, "f1-vanishes-on-subinterval"});

  auto w12 = [&family](double t) { return family.wronskian(1, 2, t); };
  const auto w12_scan = detail::scan_zeros(w12, iv, grid_points);
  report.wronskian12_ok = w12_scan.zeros.empty() && !w12_scan.plateau;
  for (double t : w12_scan.zeros)
    report.violations.push_back({t, "wronskian12-singular"});
  if (w12_scan.plateau)
    report.violations.push_back({w12_scan.plateau_at, "wronskian12-singular-on-subinterval"});

  if (family.dim() >= 4) {
    auto w34 = [&family](double t) { return family.wronskian(3, 4, t); };
    const auto w34_scan = detail::scan_zeros(w34, iv, grid_points);
    report.wronskian34_ok = w34_scan.zeros.empty() && !w34_scan.plateau;
    for (double t : w34_scan.zeros)
      report.violations.push_back({t, "wronskian34-singular"});
    if (w34_scan.plateau)
      report.violations.push_back({w34_scan.plateau_at, "wronskian34-singular-on-subinterval"});
  }

  // Inflection candidates of the envelope (dim 2 picture) when it exists.
  if (family.dim() == 2 && report.wronskian12_ok) {
    auto s2 = [&family](double t) {
      const Jet3 f0 = family.jet(0, t), a = family.jet(1, t), b = family.jet(2, t);
      const double w = a.value * b.d1 - a.d1 * b.value;
      const double x1 = -(b.d1 * f0.value - b.value * f0.d1) / w;
      const double x2 = -(-a.d1 * f0.value + a.value * f0.d1) / w;
      return f0.d2 + a.d2 * x1 + b.d2 * x2;
    };
    const auto g_scan = detail::scan_zeros(s2, iv, grid_points);
    report.gamma_candidates = g_scan.zeros;
  }
  return report;
}

}  // namespace rzero
