#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bmeq/equality.hpp"
#include "bmeq/numerics.hpp"

namespace bmeq {

namespace {

constexpr double kInfResidual = std::numeric_limits<double>::infinity();

// Uniform double in [0,1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kEqual: return "Equal";
    case Verdict::kNotEqual: return "NotEqual";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(Route r) {
  switch (r) {
    case Route::kMain: return "main";
    case Route::kMainPlus: return "main-plus";
    case Route::kAuto: return "auto";
  }
  return "auto";
}

DiagnosticResult make_diagnostic(std::string name, double max_residual, double threshold,
                                 std::vector<double> witness) {
  DiagnosticResult d;
  d.name = std::move(name);
  d.max_residual = max_residual;
  d.threshold = threshold;
  d.pass = max_residual <= threshold;
  d.witness = std::move(witness);
  return d;
}

NearDiagonalGrid::NearDiagonalGrid(const Interval& window, std::size_t n, std::size_t grid,
                                   double radius)
    : window_(window), n_(n), bases_(), radius_(radius) {
  if (!window.finite()) fail(ErrorKind::kDomain, "near-diagonal grid needs a finite window");
  if (n < 1 || n > 16) fail(ErrorKind::kConfig, "near-diagonal grid arity must be in 1..16");
  if (grid < 3) fail(ErrorKind::kConfig, "grid must have at least 3 base points");
  if (!(radius > 0)) fail(ErrorKind::kConfig, "radius must be positive");
  bases_ = chebyshev_nodes(window, grid);
}

void NearDiagonalGrid::tuple(std::size_t k, std::span<double> out) const {
  const std::size_t per = patterns_per_base();
  const double base = bases_[k / per];
  const std::size_t m = k % per;
  const std::size_t corners = std::size_t{1} << n_;
  const double margin = 1e-12 * window_.length();
  const double lo = window_.lo() + margin;
  const double hi = window_.hi() - margin;
  for (std::size_t i = 0; i < n_; ++i) {
    double offset;
    if (m < corners) {
      offset = ((m >> i) & 1U) ? radius_ : -radius_;
    } else {
      const std::size_t axis = (m - corners) / 2;
      const double sign = ((m - corners) % 2) ? 1.0 : -1.0;
      offset = axis == i ? sign * radius_ : 0.0;
    }
    out[i] = std::clamp(base + offset, lo, hi);
  }
}

std::vector<double> NearDiagonalGrid::tuple(std::size_t k) const {
  std::vector<double> out(n_);
  tuple(k, out);
  return out;
}

DiagnosticResult verify_equality_grid(const MeanSpec& left, const MeanSpec& right, std::size_t n,
                                      std::size_t grid, double radius, double tol, Exec exec) {
  if (n != left.arity() || n != right.arity()) {
    fail(ErrorKind::kConfig, "verification arity must match both means");
  }
  if (!(left.domain() == right.domain())) fail(ErrorKind::kConfig, "means must share the interval");
  const NearDiagonalGrid tuples(left.domain().working_window(), n, grid, radius);
  const auto best = sweep_max(
      tuples.size(),
      [&](std::size_t k) {
        const auto x = tuples.tuple(k);
        return std::abs(mean_direct(left, x) - mean_direct(right, x));
      },
      exec);
  auto diag = make_diagnostic("equality_grid", best.value, tol, tuples.tuple(best.index));
  diag.values["left_mean"] = mean_direct(left, diag.witness);
  diag.values["right_mean"] = mean_direct(right, diag.witness);
  return diag;
}

DiagnosticResult verify_equality_random(const MeanSpec& left, const MeanSpec& right,
                                        std::size_t count, double radius, double tol,
                                        std::uint64_t seed, Exec exec) {
  if (!(left.domain() == right.domain()) || left.arity() != right.arity()) {
    fail(ErrorKind::kConfig, "means must share the interval and the arity");
  }
  if (count == 0) return make_diagnostic("equality_random", 0, tol);
  const Interval window = left.domain().working_window();
  const std::size_t n = left.arity();
  const double margin = 1e-12 * window.length();
  std::mt19937_64 gen(seed);
  std::vector<std::vector<double>> tuples(count, std::vector<double>(n));
  for (auto& x : tuples) {
    const double base = window.lo() + window.length() * (0.05 + 0.9 * uniform01(gen));
    for (auto& xi : x) {
      xi = std::clamp(base + radius * (2 * uniform01(gen) - 1), window.lo() + margin,
                      window.hi() - margin);
    }
  }
  const auto best = sweep_max(
      count,
      [&](std::size_t k) {
        return std::abs(mean_direct(left, tuples[k]) - mean_direct(right, tuples[k]));
      },
      exec);
  auto diag = make_diagnostic("equality_random", best.value, tol, tuples[best.index]);
  diag.values["left_mean"] = mean_direct(left, diag.witness);
  diag.values["right_mean"] = mean_direct(right, diag.witness);
  return diag;
}

DiagnosticResult first_order_condition(const ReducedSystem& rs, std::size_t grid,
                                       double threshold, Exec exec) {
  const auto us = chebyshev_nodes(rs.J.working_window(), grid);
  const std::size_t n = rs.P.size();
  // Index k covers (grid point, weight index).
  auto residual = [&](std::size_t k) {
    const double u = us[k / n];
    const std::size_t i = k % n;
    double p0 = 0;
    double q0 = 0;
    for (std::size_t l = 0; l < n; ++l) {
      p0 += rs.P.eval(l, u);
      q0 += rs.Q.eval(l, u);
    }
    return std::abs(rs.P.eval(i, u) / p0 - rs.Q.eval(i, u) / q0);
  };
  const auto best = sweep_max(us.size() * n, residual, exec);
  auto diag = make_diagnostic("first_order_condition", best.value, threshold, {us[best.index / n]});
  diag.values["index"] = static_cast<double>(best.index % n);
  return diag;
}

DiagnosticResult eq3_residual(const ReducedSystem& rs, std::size_t n, std::size_t grid,
                              double radius, double threshold, Exec exec) {
  if (n != rs.P.size()) fail(ErrorKind::kConfig, "eq3 arity must match the weight family");
  const NearDiagonalGrid tuples(rs.J.working_window(), n, grid, radius);
  auto residual = [&](std::size_t k) {
    const auto u = tuples.tuple(k);
    double sp = 0;
    double spu = 0;
    double num = 0;
    double den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = rs.P.eval(i, u[i]);
      const double r = rs.r.eval(u[i]);
      sp += p;
      spu += p * u[i];
      num += r * rs.h.eval(u[i]) * p;
      den += r * p;
    }
    return std::abs(rs.h.eval(spu / sp) - num / den);
  };
  const auto best = sweep_max(tuples.size(), residual, exec);
  return make_diagnostic("eq3_residual", best.value, threshold, tuples.tuple(best.index));
}

namespace {

struct PairTerms {
  double Pi, Pj, dPi, dPj;
  double ru, rv, dru, drv;
  double hu, hv, dhu, dhv;
};

PairTerms pair_terms(const ReducedSystem& rs, std::size_t i, std::size_t j, double u, double v) {
  return PairTerms{rs.P.eval(i, u),     rs.P.eval(j, v),     rs.P[i].derivative(u),
                   rs.P[j].derivative(v), rs.r.eval(u),      rs.r.eval(v),
                   rs.r.derivative(u),  rs.r.derivative(v),  rs.h.eval(u),
                   rs.h.eval(v),        rs.h.derivative(u),  rs.h.derivative(v)};
}

void check_pair(const ReducedSystem& rs, std::size_t i, std::size_t j) {
  if (i == j || i >= rs.P.size() || j >= rs.P.size()) {
    fail(ErrorKind::kBadIndices, "need distinct indices below the arity");
  }
}

}  // namespace

DiagnosticResult residual_ij(const ReducedSystem& rs, std::size_t i, std::size_t j,
                             std::size_t grid, double radius, double threshold, Exec exec) {
  check_pair(rs, i, j);
  const NearDiagonalGrid pairs(rs.J.working_window(), 2, grid, radius);
  auto residual = [&](std::size_t k) {
    const auto uv = pairs.tuple(k);
    const double u = uv[0];
    const double v = uv[1];
    const auto t = pair_terms(rs, i, j, u, v);
    const double rPi = t.ru * t.Pi;
    const double rPj = t.rv * t.Pj;
    const double d_rPi = t.dru * t.Pi + t.ru * t.dPi;
    const double d_rPj = t.drv * t.Pj + t.rv * t.dPj;
    const double lhs = (t.Pi * (t.Pi + t.Pj) + t.dPi * t.Pj * (u - v)) *
                       (t.dhv * rPj * (rPi + rPj) + d_rPj * rPi * (t.hv - t.hu));
    const double rhs = (t.Pj * (t.Pi + t.Pj) + t.dPj * t.Pi * (v - u)) *
                       (t.dhu * rPi * (rPi + rPj) + d_rPi * rPj * (t.hu - t.hv));
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
  };
  const auto best = sweep_max(pairs.size(), residual, exec);
  return make_diagnostic("residual_ij", best.value, threshold, pairs.tuple(best.index));
}

DiagnosticResult residual_ij_plus(const ReducedSystem& rs, std::size_t i, std::size_t j,
                                  std::size_t grid, double radius, double threshold, Exec exec) {
  check_pair(rs, i, j);
  const NearDiagonalGrid pairs(rs.J.working_window(), 2, grid, radius);
  auto inv_r2 = [&](double s) {
    const double r = rs.r.eval(s);
    return 1 / (r * r);
  };
  auto residual = [&](std::size_t k) {
    const auto uv = pairs.tuple(k);
    const double u = uv[0];
    const double v = uv[1];
    if (u == v) return 0.0;
    const auto t = pair_terms(rs, i, j, u, v);
    const double rPi = t.ru * t.Pi;
    const double rPj = t.rv * t.Pj;
    const double d_rPi = t.dru * t.Pi + t.ru * t.dPi;
    const double d_rPj = t.drv * t.Pj + t.rv * t.dPj;
    const double integral = numerics::simpson_adaptive(inv_r2, v, u, 1e-12);
    const double lhs = (t.rv - t.ru) / (t.ru * t.rv * (u - v));
    const double term1 = (t.rv * t.dPj * t.Pi * t.Pi + t.ru * t.dPi * t.Pj * t.Pj) /
                         (rPi * rPj * (t.Pi + t.Pj));
    const double term2 = (d_rPi * t.rv * t.Pj * t.Pj + d_rPj * t.ru * t.Pi * t.Pi) /
                         (t.Pi * t.Pj * (rPi + rPj)) * integral / (u - v);
    const double term3 = (t.rv * t.dPj * t.dru * t.Pi - t.ru * t.dPi * t.drv * t.Pj) /
                         ((t.Pi + t.Pj) * (rPi + rPj)) * integral;
    const double rhs = term1 - term2 + term3;
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
  };
  const auto best = sweep_max(pairs.size(), residual, exec);
  return make_diagnostic("residual_ij_plus", best.value, threshold, pairs.tuple(best.index));
}

DiagnosticResult hprime_r2_constancy(const ReducedSystem& rs, std::size_t grid,
                                     double threshold) {
  const auto us = chebyshev_nodes(rs.J.working_window(), grid);
  std::vector<double> gamma;
  gamma.reserve(us.size());
  for (double u : us) {
    const double r = rs.r.eval(u);
    gamma.push_back(rs.h.derivative(u) * r * r);
  }
  const auto [lo, hi] = std::minmax_element(gamma.begin(), gamma.end());
  double scale = 0;
  for (double g : gamma) scale = std::max(scale, std::abs(g));
  const double residual = scale > 0 ? (*hi - *lo) / scale : 0.0;
  auto diag = make_diagnostic(
      "hprime_r2_constancy", residual, threshold,
      {us[static_cast<std::size_t>(lo - gamma.begin())], us[static_cast<std::size_t>(hi - gamma.begin())]});
  std::vector<double> sorted = gamma;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  diag.values["gamma"] =
      sorted.size() % 2 ? sorted[mid] : std::midpoint(sorted[mid - 1], sorted[mid]);
  return diag;
}

double symmetric_derivative_rprime(const ReducedSystem& rs, double w, double t) {
  if (!(t > 0) || !rs.J.contains(w - t) || !rs.J.contains(w + t)) {
    fail(ErrorKind::kDomain, "[w - t, w + t] must lie inside J");
  }
  return (rs.r.derivative(w + t) - rs.r.derivative(w - t)) / (2 * t);
}

AffinityResult affinity_of_r(const ReducedSystem& rs, std::size_t grid,
                             double derivative_threshold, double fit_threshold) {
  const Interval window = rs.J.working_window();
  const auto ws = chebyshev_nodes(window, grid);
  const double t0 = 0.05 * window.length();
  double worst = 0;
  double worst_w = ws.front();
  std::vector<numerics::Point> points;
  for (double w : ws) {
    const double room = std::min(w - window.lo(), window.hi() - w);
    const double t = std::min(t0, 0.5 * room);
    const double value = std::abs(numerics::richardson_extrapolate(
        [&](double s) { return symmetric_derivative_rprime(rs, w, s); }, t, 3));
    const double v = std::isnan(value) ? kInfResidual : value;
    if (v > worst) {
      worst = v;
      worst_w = w;
    }
    points.push_back({w, rs.r.eval(w)});
  }
  const auto fit = numerics::affine_lsq(points);
  AffinityResult out{
      make_diagnostic("affinity_symmetric_derivative", worst, derivative_threshold, {worst_w}),
      make_diagnostic("affinity_affine_fit", fit.max_rel_residual, fit_threshold), fit.slope,
      fit.intercept};
  out.affine_fit.values["c"] = fit.slope;
  out.affine_fit.values["d"] = fit.intercept;
  return out;
}

DiagnosticResult validate_params(const MeanSpec& left, const MeanSpec& right,
                                 const MoebiusParams& params, std::size_t grid,
                                 double threshold) {
  const auto xs = left.domain().working_window().sample(std::max<std::size_t>(4 * grid, 16));
  const auto [a, b, c, d] = params;
  auto residual = [&](std::size_t k) {
    const double x = xs[k];
    const double f = left.generator().eval(x);
    const double s = c * f + d;
    if (!(s > 0)) return kInfResidual;
    const double g = right.generator().eval(x);
    double worst = std::abs(g - (a * f + b) / s) / std::max(1.0, std::abs(g));
    for (std::size_t i = 0; i < left.arity(); ++i) {
      const double q = right.weights().eval(i, x);
      worst = std::max(worst, std::abs(q - s * left.weights().eval(i, x)) / q);
    }
    return worst;
  };
  const auto best = sweep_max_serial(xs.size(), residual);
  return make_diagnostic("fit_validation", best.value, threshold, {xs[best.index]});
}

MoebiusFit fit_moebius(const MeanSpec& left, const MeanSpec& right, const ReducedSystem& rs,
                       std::size_t grid, const Thresholds& thresholds) {
  MoebiusFit fit{{},
                 affinity_of_r(rs, grid, thresholds.derivative, thresholds.affine_fit),
                 {},
                 {}};
  const auto us = chebyshev_nodes(rs.J.working_window(), grid);
  std::vector<numerics::Point> points;
  for (double u : us) points.push_back({u, rs.h.eval(u) * rs.r.eval(u)});
  const auto hr = numerics::affine_lsq(points);
  fit.hr_fit = make_diagnostic("hr_affine_fit", hr.max_rel_residual, thresholds.affine_fit);
  fit.params = MoebiusParams{hr.slope, hr.intercept, fit.affinity.c, fit.affinity.d};
  fit.hr_fit.values["a"] = hr.slope;
  fit.hr_fit.values["b"] = hr.intercept;
  try {
    fit.params.validate();
    fit.validation = validate_params(left, right, fit.params, grid, thresholds.fit_validation);
  } catch (const Error&) {
    fit.validation = make_diagnostic("fit_validation", kInfResidual, thresholds.fit_validation);
  }
  if (!fit.affinity.pass() || !fit.hr_fit.pass || !fit.validation.pass) {
    throw FitFailure("fitted Moebius parameters do not reproduce the right-hand mean", fit);
  }
  return fit;
}

MoebiusFit fit_moebius(const MeanSpec& left, const MeanSpec& right, std::size_t grid,
                       const Thresholds& thresholds) {
  return fit_moebius(left, right, reduce(left, right), grid, thresholds);
}

}  // namespace bmeq
