#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "bmeq/equality.hpp"

namespace bmeq {

namespace {

constexpr double kInfResidual = std::numeric_limits<double>::infinity();

// A diagnostic that throws is recorded as a failure instead of aborting the run.
DiagnosticResult guarded(const std::string& name, double threshold,
                         const std::function<DiagnosticResult()>& run) {
  try {
    return run();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    auto diag = make_diagnostic(name, kInfResidual, threshold);
    diag.values["error_kind"] = static_cast<double>(e.kind());
    return diag;
  }
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Smallest sampled relative gap between two weights on `sub`, as a diagnostic
// that passes when the gap stays above the margin everywhere.
DiagnosticResult distinct_weights(const std::function<double(double)>& lhs,
                                  const std::function<double(double)>& rhs, const Interval& sub,
                                  double margin) {
  double worst = kInfResidual;
  double at = std::midpoint(sub.lo(), sub.hi());
  for (double x : sub.sample(64)) {
    const double gap = relative_gap(lhs(x), rhs(x));
    if (gap < worst) {
      worst = gap;
      at = x;
    }
  }
  auto diag = make_diagnostic("hypothesis_distinct_weights", 1 - worst, 1 - margin, {at});
  diag.values["margin"] = worst;
  return diag;
}

MeanSpec two_weight_system(const MeanSpec& m, std::size_t a, std::size_t b, std::size_t c) {
  std::vector<Expr> weights{m.weights()[a], ex::sum({m.weights()[b], m.weights()[c]})};
  return MeanSpec(m.generator(), WeightFamily(std::move(weights), m.domain()));
}

struct MainOutcome {
  std::vector<DiagnosticResult> diagnostics;
  std::optional<MoebiusParams> params;
};

// Main route on specs already restricted to I0, for the weight pair (i, j).
MainOutcome run_main(const MeanSpec& left, const MeanSpec& right, std::size_t i, std::size_t j,
                     const DecideConfig& cfg) {
  const auto& th = cfg.thresholds;
  MainOutcome out;
  const ReducedSystem rs = reduce(left, right);
  const double radius = cfg.radius_fraction * rs.J.working_window().length();
  out.diagnostics.push_back(guarded("first_order_condition", th.first_order, [&] {
    return first_order_condition(rs, cfg.grid, th.first_order, cfg.exec);
  }));
  out.diagnostics.push_back(guarded("eq3_residual", th.equality, [&] {
    return eq3_residual(rs, rs.P.size(), cfg.grid, radius, th.equality, cfg.exec);
  }));
  out.diagnostics.push_back(guarded("residual_ij", th.derivative, [&] {
    return residual_ij(rs, i, j, cfg.grid, radius, th.derivative, cfg.exec);
  }));
  if (cfg.extended_diagnostics) {
    out.diagnostics.push_back(guarded("residual_ij_plus", th.derivative, [&] {
      return residual_ij_plus(rs, i, j, cfg.grid, radius, th.derivative, cfg.exec);
    }));
  }
  const auto gamma = guarded("hprime_r2_constancy", th.derivative,
                             [&] { return hprime_r2_constancy(rs, cfg.grid, th.derivative); });
  out.diagnostics.push_back(gamma);

  MoebiusFit fit;
  try {
    fit = fit_moebius(left, right, rs, cfg.grid, th);
    out.params = fit.params;
  } catch (const FitFailure& e) {
    fit = e.fit();
  }
  out.diagnostics.push_back(fit.affinity.symmetric_derivative);
  out.diagnostics.push_back(fit.affinity.affine_fit);
  out.diagnostics.push_back(fit.hr_fit);
  fit.validation.name = "fit_validation_subinterval";
  out.diagnostics.push_back(fit.validation);

  const double det = fit.params.determinant();
  const auto it = gamma.values.find("gamma");
  const double g = it == gamma.values.end() ? std::nan("") : it->second;
  auto consistency = make_diagnostic(
      "gamma_consistency", det != 0 ? std::abs(g - det) / std::abs(det) : kInfResidual,
      th.gamma_consistency);
  if (std::isnan(consistency.max_residual)) {
    consistency.max_residual = kInfResidual;
    consistency.pass = false;
  }
  consistency.values["gamma"] = g;
  consistency.values["determinant"] = det;
  out.diagnostics.push_back(consistency);
  return out;
}

std::size_t resolve_arity(const MeanSpec& left, const MeanSpec& right, const DecideConfig& cfg) {
  if (left.arity() != right.arity()) fail(ErrorKind::kConfig, "means must have the same arity");
  if (!(left.domain() == right.domain())) fail(ErrorKind::kConfig, "means must share the interval");
  const std::size_t n = cfg.n == 0 ? left.arity() : cfg.n;
  if (n != left.arity()) fail(ErrorKind::kConfig, "n must equal the number of weights");
  if (cfg.grid < 3) fail(ErrorKind::kConfig, "grid must be at least 3");
  if (!(cfg.radius_fraction > 0 && cfg.radius_fraction < 0.5)) {
    fail(ErrorKind::kConfig, "radius must lie in (0, 0.5) as a fraction of the window");
  }
  return n;
}

Interval resolve_subinterval(const MeanSpec& m, const DecideConfig& cfg) {
  const Interval window = m.domain().working_window();
  if (!cfg.subinterval) return window;
  const Interval& sub = *cfg.subinterval;
  if (!sub.finite() || !m.domain().contains_closed(sub.lo()) ||
      !m.domain().contains_closed(sub.hi())) {
    fail(ErrorKind::kConfig, "subinterval must be finite and inside the interval");
  }
  return sub;
}

void check_pair(const std::array<std::size_t, 2>& pair, std::size_t n) {
  if (pair[0] == pair[1] || pair[0] >= n || pair[1] >= n) {
    fail(ErrorKind::kConfig, "pair needs two distinct indices below the arity");
  }
}

void check_triple(const std::array<std::size_t, 3>& t, std::size_t n) {
  if (!(t[0] < t[1] && t[1] < t[2] && t[2] < n)) {
    fail(ErrorKind::kConfig, "triple needs increasing indices below the arity");
  }
}

Route resolve_route(const DecideConfig& cfg, std::size_t n) {
  switch (cfg.route) {
    case Route::kMain:
      if (!cfg.pair) fail(ErrorKind::kConfig, "route main needs a declared index pair");
      check_pair(*cfg.pair, n);
      return Route::kMain;
    case Route::kMainPlus:
      if (!cfg.triple) fail(ErrorKind::kConfig, "route main-plus needs a declared index triple");
      check_triple(*cfg.triple, n);
      return Route::kMainPlus;
    case Route::kAuto:
      if (cfg.pair) {
        check_pair(*cfg.pair, n);
        return Route::kMain;
      }
      if (cfg.triple) {
        check_triple(*cfg.triple, n);
        return Route::kMainPlus;
      }
      fail(ErrorKind::kConfig, "neither an index pair nor an index triple was declared");
  }
  fail(ErrorKind::kConfig, "unknown route");
}

bool all_pass(const std::vector<DiagnosticResult>& diags) {
  return std::all_of(diags.begin(), diags.end(), [](const auto& d) { return d.pass; });
}

}  // namespace

EqualityReport decide_equality(const MeanSpec& left, const MeanSpec& right,
                               const DecideConfig& config) {
  const std::size_t n = resolve_arity(left, right, config);
  const Route route = resolve_route(config, n);
  const Interval I0 = resolve_subinterval(left, config);
  const auto& th = config.thresholds;

  EqualityReport report;
  report.interval = left.domain();
  report.n = n;
  report.grid = config.grid;
  report.radius = config.radius_fraction * left.domain().working_window().length();
  report.route = route;

  // Stage 1: search for a witness of inequality.
  auto grid = verify_equality_grid(left, right, n, config.grid, report.radius, th.equality,
                                   config.exec);
  auto random = verify_equality_random(left, right, config.random_points, report.radius,
                                       th.equality, config.seed, config.exec);
  for (auto* stage : {&grid, &random}) {
    report.diagnostics.push_back(*stage);
    if (stage->pass) continue;
    const auto& x = stage->witness;
    const double gap = std::abs(mean_by_sign_characterization(left, x) -
                                mean_by_sign_characterization(right, x));
    report.diagnostics.back().values["independent_gap"] = gap;
    report.verdict = Verdict::kNotEqual;
    report.witness = x;
    return report;
  }

  // Stage 2: the chosen route on I0.
  const MeanSpec left0 = restrict_domain(left, I0);
  const MeanSpec right0 = restrict_domain(right, I0);
  MainOutcome outcome;
  if (route == Route::kMain) {
    const auto [i, j] = *config.pair;
    report.indices = {i, j};
    report.subinterval = I0;
    report.diagnostics.push_back(distinct_weights([&](double x) { return left.weights().eval(i, x); },
                                                  [&](double x) { return left.weights().eval(j, x); },
                                                  I0, th.distinct_margin));
    outcome = run_main(left0, right0, i, j, config);
  } else {
    const auto [t0, t1, t2] = *config.triple;
    const std::array<std::array<std::size_t, 3>, 3> orders{
        {{t0, t1, t2}, {t1, t0, t2}, {t2, t0, t1}}};
    const double x0 = std::midpoint(I0.lo(), I0.hi());
    const auto& p = left.weights();
    auto lone = [&](const std::array<std::size_t, 3>& o) {
      return [&p, o](double x) { return p.eval(o[0], x); };
    };
    auto pair_sum = [&](const std::array<std::size_t, 3>& o) {
      return [&p, o](double x) { return p.eval(o[1], x) + p.eval(o[2], x); };
    };
    const auto chosen = std::find_if(orders.begin(), orders.end(), [&](const auto& o) {
      return relative_gap(lone(o)(x0), pair_sum(o)(x0)) > th.distinct_margin;
    });
    if (chosen == orders.end()) {
      // Cannot happen for positive weights; reported rather than asserted.
      auto diag = make_diagnostic("hypothesis_distinct_weights", 1, 1 - th.distinct_margin, {x0});
      report.diagnostics.push_back(diag);
      report.verdict = Verdict::kInconclusive;
      return report;
    }
    const auto order = *chosen;
    report.indices = {order[0], order[1], order[2]};
    double half = I0.length() / 2;
    Interval sub = I0;
    DiagnosticResult hypothesis;
    for (int halving = 0; halving <= 40; ++halving, half /= 2) {
      sub = Interval(std::max(I0.lo(), x0 - half), std::min(I0.hi(), x0 + half));
      hypothesis = distinct_weights(lone(order), pair_sum(order), sub, th.distinct_margin);
      if (hypothesis.pass) break;
    }
    report.subinterval = sub;
    report.diagnostics.push_back(hypothesis);
    const MeanSpec left2 = restrict_domain(two_weight_system(left, order[0], order[1], order[2]), sub);
    const MeanSpec right2 =
        restrict_domain(two_weight_system(right, order[0], order[1], order[2]), sub);
    outcome = run_main(left2, right2, 0, 1, config);
  }
  report.diagnostics.insert(report.diagnostics.end(), outcome.diagnostics.begin(),
                            outcome.diagnostics.end());

  // Stage 3: the fitted parameters must reproduce the right mean on all of I.
  if (outcome.params) {
    report.fitted = outcome.params;
    report.diagnostics.push_back(guarded("fit_validation", th.fit_validation, [&] {
      return validate_params(left, right, *outcome.params, config.grid, th.fit_validation);
    }));
  } else {
    report.diagnostics.push_back(make_diagnostic("fit_validation", kInfResidual, th.fit_validation));
  }
  report.verdict = all_pass(report.diagnostics) ? Verdict::kEqual : Verdict::kInconclusive;
  return report;
}

std::vector<DiagnosticResult> run_diagnostics(const MeanSpec& left, const MeanSpec& right,
                                              const DecideConfig& config) {
  const std::size_t n = resolve_arity(left, right, config);
  const auto pair = config.pair.value_or(std::array<std::size_t, 2>{0, 1});
  check_pair(pair, n);
  const Interval I0 = resolve_subinterval(left, config);
  const double radius = config.radius_fraction * left.domain().working_window().length();

  std::vector<DiagnosticResult> diags;
  diags.push_back(verify_equality_grid(left, right, n, config.grid, radius,
                                       config.thresholds.equality, config.exec));
  DecideConfig extended = config;
  extended.extended_diagnostics = true;
  auto outcome =
      run_main(restrict_domain(left, I0), restrict_domain(right, I0), pair[0], pair[1], extended);
  diags.insert(diags.end(), outcome.diagnostics.begin(), outcome.diagnostics.end());
  return diags;
}

}  // namespace bmeq
