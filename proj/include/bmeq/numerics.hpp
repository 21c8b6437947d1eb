#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "bmeq/error.hpp"
#include "bmeq/interval.hpp"

namespace bmeq::numerics {

struct BisectionConfig {
  double tol_abs = 1e-12;
  int max_iter = 200;
};

/// Bracketed bisection on a sign function that is nondecreasing over
/// [lo, hi] (negative region below positive region). Any exact zero is
/// returned immediately. If the whole bracket is positive, returns lo; if it
/// is entirely negative, returns hi.
template <class SignFn>
double bisect(SignFn&& sign_fn, double lo, double hi,
              const BisectionConfig& cfg = {}) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo <= hi)) {
    fail(ErrorKind::kDomain, "bisect needs a finite bracket lo <= hi");
  }
  if (!(cfg.tol_abs > 0)) fail(ErrorKind::kDomain, "bisect tolerance must be positive");
  const int s_lo = sign_fn(lo);
  if (s_lo >= 0) return lo;
  const int s_hi = sign_fn(hi);
  if (s_hi <= 0) return hi;
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (hi - lo <= cfg.tol_abs) return std::midpoint(lo, hi);
    const double mid = std::midpoint(lo, hi);
    // Bracket is one ulp wide.
    if (mid == lo || mid == hi) return mid;
    const int s = sign_fn(mid);
    if (s == 0) return mid;
    (s < 0 ? lo : hi) = mid;
  }
  fail(ErrorKind::kIterationCap, "bisect exceeded iteration cap");
}

/// Solves f(x) = y for a strictly monotone f on `domain` (ends may be
/// infinite; f is never evaluated at a finite end). Stops when the bracket
/// is below rel_tol * max(|lo|,|hi|) or one ulp wide. If y lies outside the
/// range, the nearest end of the domain bracket is returned.
template <class Fn>
double invert_monotone(Fn&& f, double y, const Interval& domain, bool increasing,
                       double rel_tol = 1e-14) {
  // g is nondecreasing in x; g < 0 left of the solution.
  auto g = [&](double x) {
    const double v = f(x);
    if (std::isnan(v)) fail(ErrorKind::kDomain, "NaN while inverting");
    return increasing ? v - y : y - v;
  };
  double lo = domain.lo();
  double hi = domain.hi();
  if (!std::isfinite(hi)) {
    const double base = std::isfinite(lo) ? lo : 0.0;
    double step = std::max(1.0, std::abs(base));
    double probe = base + step;
    while (g(probe) < 0) {
      lo = probe;
      step *= 2;
      probe = base + step;
      if (!std::isfinite(probe)) fail(ErrorKind::kRange, "value beyond the range of the function");
    }
    hi = probe;
  }
  if (!std::isfinite(lo)) {
    const double base = hi;
    double step = std::max(1.0, std::abs(base));
    double probe = base - step;
    while (g(probe) > 0) {
      hi = probe;
      step *= 2;
      probe = base - step;
      if (!std::isfinite(probe)) fail(ErrorKind::kRange, "value beyond the range of the function");
    }
    lo = probe;
  }
  for (int it = 0; it < 4000; ++it) {
    const double mid = std::midpoint(lo, hi);
    if (mid == lo || mid == hi) return mid;
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) return mid;
    const double v = g(mid);
    if (v == 0) return mid;
    (v < 0 ? lo : hi) = mid;
  }
  fail(ErrorKind::kIterationCap, "invert_monotone exceeded iteration cap");
}

/// (fn(x+h) - fn(x-h)) / (2h).
template <class Fn>
double central_diff(Fn&& fn, double x, double h) {
  return (fn(x + h) - fn(x - h)) / (2 * h);
}

/// Richardson extrapolation of a difference quotient q(t) whose error is an
/// even power series in t. Uses t = h, h/2, ..., h/2^(levels-1), giving an
/// O(h^(2*levels)) estimate.
template <class Quotient>
double richardson_extrapolate(Quotient&& q, double h, int levels) {
  if (levels < 1) fail(ErrorKind::kDomain, "richardson needs levels >= 1");
  std::vector<double> row(static_cast<std::size_t>(levels));
  double t = h;
  for (int k = 0; k < levels; ++k, t /= 2) {
    double current = q(t);
    double factor = 4;
    for (int m = 1; m <= k; ++m, factor *= 4) {
      const double previous = row[static_cast<std::size_t>(m - 1)];
      row[static_cast<std::size_t>(m - 1)] = current;
      current = current + (current - previous) / (factor - 1);
    }
    row[static_cast<std::size_t>(k)] = current;
  }
  return row[static_cast<std::size_t>(levels - 1)];
}

inline double default_step(double x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1 + std::abs(x));
}

template <class Fn>
double richardson(Fn&& fn, double x, double h, int levels = 3) {
  return richardson_extrapolate([&](double t) { return central_diff(fn, x, t); }, h,
                                levels);
}

namespace detail {

template <class Fn>
double simpson_step(Fn& fn, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = std::midpoint(a, b);
  const double lm = std::midpoint(a, m);
  const double rm = std::midpoint(m, b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  if (depth <= 0) fail(ErrorKind::kSubdivisionCap, "simpson_adaptive hit the subdivision cap");
  return simpson_step(fn, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(fn, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of fn over [lo, hi] to absolute tolerance tol.
/// lo > hi is allowed and flips the sign.
template <class Fn>
double simpson_adaptive(Fn&& fn, double lo, double hi, double tol = 1e-12,
                        int max_depth = 50) {
  if (!(tol > 0)) fail(ErrorKind::kDomain, "simpson tolerance must be positive");
  if (lo == hi) return 0;
  if (lo > hi) return -simpson_adaptive(fn, hi, lo, tol, max_depth);
  const double fa = fn(lo);
  const double fb = fn(hi);
  const double fm = fn(std::midpoint(lo, hi));
  const double whole = (hi - lo) / 6 * (fa + 4 * fm + fb);
  return detail::simpson_step(fn, lo, hi, fa, fm, fb, whole, tol, max_depth);
}

struct Point {
  double u;
  double v;
};

struct AffineFit {
  double slope = 0;
  double intercept = 0;
  /// max |v - fit(u)| / max |v| (absolute when every v is zero).
  double max_rel_residual = 0;
  double value(double u) const { return slope * u + intercept; }
};

/// Least-squares line through the points. Throws Degenerate when fewer than
/// two distinct abscissae are present.
AffineFit affine_lsq(std::span<const Point> points);

}  // namespace bmeq::numerics
