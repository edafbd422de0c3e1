// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <thread>
#include <vector>

#include "rzero/density.hpp"
#include "rzero/envelope.hpp"
#include "rzero/errors.hpp"
#include "rzero/family.hpp"
#include "rzero/rng.hpp"

namespace rzero {

enum class RootMethod { Sturm, Companion, GridBisect };

inline const char* to_string(RootMethod m) {
  switch (m) {
    case RootMethod::Sturm: return "sturm";
    case RootMethod::Companion: return "companion";
    case RootMethod::GridBisect: return "grid-bisect";
  }
  return "?";
}

struct RootCountConfig {
  RootMethod method = RootMethod::GridBisect;
  int grid = 0;  // 0: 64 * dim points per unit parameter length
  double cluster_tol = 1e-9;
  double poly_eps = 1e-9;
};

/// Monte Carlo estimate of the expected zero count.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::map<int, std::uint64_t> histogram;  // key -1: degenerate samples
  std::uint64_t seed = 0;
};

namespace detail {

// ---- Sturm sequences -------------------------------------------------------

inline void poly_trim(std::vector<double>& p, double drop) {
  while (p.size() > 1 && std::abs(p.back()) <= drop) p.pop_back();
}

inline double poly_eval(const std::vector<double>& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline double poly_inf_norm(const std::vector<double>& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::abs(c));
  return m;
}

inline void poly_normalize(std::vector<double>& p) {
  const double m = poly_inf_norm(p);
  if (m > 0.0)
    for (double& c : p) c /= m;
}

// Remainder of a by b (b nonconstant, normalized); quotient discarded.
inline std::vector<double> poly_rem(std::vector<double> a,
                                    const std::vector<double>& b,
                                    double drop_rel) {
  const int db = static_cast<int>(b.size()) - 1;
  const double lead = b.back();
  while (static_cast<int>(a.size()) - 1 >= db) {
    const int da = static_cast<int>(a.size()) - 1;
    const double f = a.back() / lead;
    for (int k = 0; k <= db; ++k) a[da - db + k] -= f * b[k];
    a.pop_back();
    poly_trim(a, drop_rel * std::max(1.0, poly_inf_norm(a)));
  }
  return a;
}

/// Sturm chain with inf-norm normalization at every step and a relative drop
/// threshold for vanishing leading coefficients. Counts distinct real roots
/// in (lo, hi].
inline int sturm_distinct_roots(std::vector<double> p, double lo, double hi) {
  const double drop = 1e-13;
  poly_trim(p, drop * std::max(1.0, poly_inf_norm(p)));
  if (p.size() <= 1) {
    if (p.empty() || p[0] == 0.0)
      throw DegenerateSample("identically zero polynomial");
    return 0;
  }
  std::vector<std::vector<double>> chain;
  poly_normalize(p);
  chain.push_back(p);
  std::vector<double> d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = i * p[i];
  poly_normalize(d);
  chain.push_back(d);
  while (chain.back().size() > 1) {
    auto r = poly_rem(chain[chain.size() - 2], chain.back(), drop);
    for (double& c : r) c = -c;
    poly_normalize(r);
    if (r.size() == 1 && r[0] == 0.0) break;  // previous element is the gcd
    chain.push_back(std::move(r));
  }
  auto sign_changes = [&chain](double x) {
    int changes = 0, prev = 0;
    for (const auto& q : chain) {
      const double v = poly_eval(q, x);
      const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
      if (s != 0) {
        if (prev != 0 && s != prev) ++changes;
        prev = s;
      }
    }
    return changes;
  };
  return sign_changes(lo) - sign_changes(hi);
}

// ---- companion matrix ------------------------------------------------------

inline int companion_distinct_roots(std::vector<double> p, double lo,
                                    double hi, double poly_eps,
                                    double cluster_tol) {
  poly_trim(p, 1e-13 * std::max(1.0, poly_inf_norm(p)));
  if (p.size() <= 1) {
    if (p.empty() || p[0] == 0.0)
      throw DegenerateSample("identically zero polynomial");
    return 0;
  }
  const int deg = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p[i] / p[deg];
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  std::vector<double> roots;
  for (int i = 0; i < deg; ++i) {
    const double re = eig(i).real(), im = eig(i).imag();
    if (std::abs(im) <= poly_eps * std::max(1.0, std::abs(re)) && re >= lo &&
        re <= hi)
      roots.push_back(re);
  }
  return cluster_count(roots, cluster_tol);
}

// ---- sign-change grid ------------------------------------------------------

inline int grid_bisect_roots(const BasisFamily& family,
                             std::span<const double> x, const Interval& iv,
                             int grid, double cluster_tol) {
  const int n = std::max(grid, 16);
  std::vector<double> roots;
  auto g = [&](double t) { return family.eval(x, t); };
  double t_prev = iv.lo, g_prev = g(t_prev);
  double scale = std::abs(g_prev);
  for (int i = 1; i <= n; ++i) {
    const double ti = iv.lo + iv.length() * i / n;
    const double gi = g(ti);
    scale = std::max(scale, std::abs(gi));
    if (g_prev == 0.0) {
      roots.push_back(t_prev);
    } else if ((g_prev < 0.0) != (gi < 0.0)) {
      roots.push_back(bisect_root(g, t_prev, ti, g_prev, gi));
    }
    t_prev = ti;
    g_prev = gi;
  }
  if (g_prev == 0.0) roots.push_back(t_prev);
  if (scale == 0.0) throw DegenerateSample("F(.;x) vanishes on the whole grid");
  return cluster_count(roots, cluster_tol);
}

inline int default_grid(const BasisFamily& family, const Interval& iv) {
  const double pts = 64.0 * family.dim() * std::max(iv.length(), 1.0);
  return static_cast<int>(std::min(pts, 1e6));
}

}  // namespace detail

/// Number of distinct real zeros of t -> F(t;x) on the interval.
/// Sturm and Companion require a polynomial family (Kac or custom table);
/// GridBisect works for any smooth family but misses even-multiplicity roots
/// (probability zero under the continuous densities in scope).
inline int count_roots(const BasisFamily& family, std::span<const double> x,
                       const Interval& iv, const RootCountConfig& cfg = {}) {
  if (static_cast<int>(x.size()) != family.dim())
    throw InvalidInput("parameter vector length != family dim");
  if (cfg.grid != 0 && cfg.grid < 16)
    throw InvalidInput("root-count grid must be >= 16");
  if (!(cfg.cluster_tol > 0.0)) throw InvalidInput("cluster_tol must be > 0");
  if (cfg.method == RootMethod::GridBisect) {
    const int grid = cfg.grid ? cfg.grid : detail::default_grid(family, iv);
    return detail::grid_bisect_roots(family, x, iv, grid, cfg.cluster_tol);
  }
  std::vector<double> coeffs;
  if (!family.poly_coefficients(x, coeffs))
    throw InvalidInput("Sturm/Companion need a polynomial family");
  if (cfg.method == RootMethod::Sturm)
    return detail::sturm_distinct_roots(std::move(coeffs), iv.lo, iv.hi);
  return detail::companion_distinct_roots(std::move(coeffs), iv.lo, iv.hi,
                                          cfg.poly_eps, cfg.cluster_tol);
}

namespace detail {

template <class PerSample>
void run_samples(long long samples, int threads, PerSample&& body) {
  if (threads <= 1) {
    for (long long i = 0; i < samples; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const long long chunk = (samples + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const long long begin = w * chunk;
    const long long end = std::min(samples, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (long long i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Samples x from the density and counts zeros per sample. Sample i draws
/// from a stream keyed by (seed, i), and the reduction runs in index order,
/// so the estimate is bitwise independent of the thread count.
inline MCEstimate estimate_expectation(const BasisFamily& family,
                                       const DensityModel& model,
                                       const Interval& iv, long long samples,
                                       std::uint64_t seed,
                                       const RootCountConfig& cfg = {},
                                       int threads = 1) {
  if (samples < 100) throw InvalidInput("need at least 100 samples");
  const Sampler sampler(model, family.dim());
  std::vector<int> counts(samples);
  detail::run_samples(samples, threads, [&](long long i) {
    SampleRng rng(seed, static_cast<std::uint64_t>(i));
    std::vector<double> x(family.dim());
    sampler(rng, x);
    try {
      counts[i] = count_roots(family, x, iv, cfg);
    } catch (const DegenerateSample&) {
      counts[i] = -1;
    }
  });

  MCEstimate est;
  est.samples = samples;
  est.seed = seed;
  long long valid = 0;
  double sum = 0.0;
  for (int c : counts) {
    ++est.histogram[c];
    if (c >= 0) {
      ++valid;
      sum += c;
    }
  }
  if (valid == 0) return est;
  est.mean = sum / valid;
  double ss = 0.0;
  for (int c : counts)
    if (c >= 0) ss += (c - est.mean) * (c - est.mean);
  est.std_error = valid > 1 ? std::sqrt(ss / (valid - 1) / valid) : 0.0;
  return est;
}

struct WedgeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  double eps = 0.0;
};

namespace detail {

inline WedgeEstimate wedge_once(const BasisFamily& family,
                                const DensityModel& model, double t,
                                double eps, long long samples,
                                std::uint64_t seed, std::uint64_t index_offset,
                                int threads) {
  const Sampler sampler(model, family.dim());
  std::vector<unsigned char> hit(samples);
  run_samples(samples, threads, [&](long long i) {
    SampleRng rng(seed, static_cast<std::uint64_t>(i) + index_offset);
    std::vector<double> x(family.dim());
    sampler(rng, x);
    hit[i] = family.eval(x, t) * family.eval(x, t + eps) <= 0.0 ? 1 : 0;
  });
  long long k = 0;
  for (unsigned char h : hit) k += h;
  const double p = static_cast<double>(k) / samples;
  WedgeEstimate est;
  est.value = p / eps;
  est.std_error = std::sqrt(p * (1.0 - p) / samples) / eps;
  est.samples = samples;
  est.eps = eps;
  return est;
}

}  // namespace detail

/// Direct estimate of H(t): the probability that F changes sign between t and
/// t+eps (membership in the thin double wedge between the two hyperplanes),
/// divided by eps. Bias O(eps). The optional Richardson step combines eps and
/// eps/2 runs on disjoint sample streams.
inline WedgeEstimate wedge_H_estimate(const BasisFamily& family,
                                      const DensityModel& model, double t,
                                      double eps, long long samples,
                                      std::uint64_t seed, int threads = 1,
                                      bool richardson = false) {
  if (!(eps > 0.0)) throw InvalidInput("wedge estimate needs eps > 0");
  if (samples < 100) throw InvalidInput("need at least 100 samples");
  const WedgeEstimate full =
      detail::wedge_once(family, model, t, eps, samples, seed, 0, threads);
  if (!richardson) return full;
  const WedgeEstimate half = detail::wedge_once(
      family, model, t, 0.5 * eps, samples, seed,
      static_cast<std::uint64_t>(samples), threads);
  WedgeEstimate est;
  est.value = 2.0 * half.value - full.value;
  est.std_error = std::sqrt(4.0 * half.std_error * half.std_error +
                            full.std_error * full.std_error);
  est.samples = 2 * samples;
  est.eps = eps;
  return est;
}

}  // namespace rzero
