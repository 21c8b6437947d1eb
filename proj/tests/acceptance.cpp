// Acceptance gate: one PASS/FAIL line per criterion. argv[1] is the path of
// the bmeq executable used for the CLI checks.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bmeq/equality.hpp"
#include "bmeq/json_io.hpp"
#include "random_specs.hpp"

using namespace bmeq;
using cases::uniform;

namespace {

const std::string kFixtures = BMEQ_FIXTURES;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& run) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-34s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              dt.count());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent mean oracle: plain bisection on sum p_i(x_i)(f(z) - f(x_i)).
double oracle_mean(const std::function<double(double)>& f,
                   const std::vector<std::function<double(double)>>& p, const std::vector<double>& x) {
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  const bool up = f(hi) >= f(lo);
  auto s = [&](double z) {
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += p[i](x[i]) * (f(z) - f(x[i]));
    return up ? acc : -acc;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (s(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct CanonicalDraw {
  MeanSpec left;
  MeanSpec right;
  MoebiusParams theta;
  std::string family;
};

// Random (f, p, theta) with c f + d > 0 on the closed hull and |ad - bc| >= 0.1.
CanonicalDraw canonical_draw(std::mt19937_64& rng, std::size_t n) {
  static const auto families = cases::invertible_families();
  const auto& fam = families[std::uniform_int_distribution<std::size_t>(0, families.size() - 1)(rng)];
  std::vector<Expr> weights;
  for (std::size_t i = 0; i < n; ++i) weights.push_back(cases::random_weight(rng, fam.domain));
  MeanSpec left = make_mean(fam.f, weights, fam.domain);
  const Interval hull = left.generator().range_hull();
  MoebiusParams theta;
  do {
    const double c = uniform(rng, -1, 1) / std::max(1.0, hull.hi() - hull.lo());
    const double low = std::min(c * hull.lo(), c * hull.hi());
    theta = {uniform(rng, -2, 2), uniform(rng, -2, 2), c, 0.5 - low + uniform(rng, 0, 1.5)};
  } while (std::abs(theta.determinant()) < 0.1);
  MeanSpec right = canonical_transform(left, theta);
  return {std::move(left), std::move(right), theta, fam.name};
}

int run_cli_quiet(const std::string& exe, const std::string& args) {
  const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name + ".json"; }

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::mt19937_64 rng(20261016);
  const auto catalog = cases::generator_catalog();

  report(1, "left-inverse suite", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::size_t jumps = 0;
    bool plateaus_exact = true;
    for (const auto& c : catalog) {
      const auto f = build_monotone(c.f, c.domain);
      const auto inv = generalized_inverse(f);
      for (double x : c.domain.sample(1000)) {
        worst = std::max(worst, std::abs(inv.eval(f.eval(x)) - x) / std::max(1.0, std::abs(x)));
      }
      if (c.jumps) ++jumps;
      for (const auto& b : f.breakpoints()) {
        if (!b.is_jump()) continue;
        const double lo = std::min(b.left_limit, b.right_limit);
        const double hi = std::max(b.left_limit, b.right_limit);
        for (int k = 0; k <= 8; ++k) plateaus_exact &= inv.eval(lo + (hi - lo) * k / 8) == b.at;
      }
    }
    const double secs = seconds_since(t0);
    const bool ok = catalog.size() >= 50 && jumps >= 5 && worst <= 1e-12 && plateaus_exact && secs <= 10;
    return Outcome{ok, std::to_string(catalog.size()) + " generators, " + std::to_string(jumps) +
                           " with jumps, max rel err " + sci(worst) + " (<= 1e-12), plateaus " +
                           (plateaus_exact ? "exact" : "WRONG")};
  });

  report(2, "mean-value bounds", [&] {
    std::size_t violations = 0;
    double reflex = 0;
    for (int draw = 0; draw < 10000; ++draw) {
      const auto& c = catalog[static_cast<std::size_t>(draw) % catalog.size()];
      const std::size_t n = 2 + static_cast<std::size_t>(draw % 3);
      const Interval d = c.domain.finite() ? c.domain : c.domain.working_window();
      std::vector<Expr> w;
      for (std::size_t i = 0; i < n; ++i) w.push_back(cases::random_weight(rng, d));
      const auto m = make_mean(c.f, w, d);
      const auto x = cases::random_tuple(rng, d, n);
      const double a = mean_direct(m, x);
      if (a < *std::min_element(x.begin(), x.end()) || a > *std::max_element(x.begin(), x.end())) ++violations;
      const std::vector<double> diag(n, x[0]);
      reflex = std::max(reflex, std::abs(mean_direct(m, diag) - x[0]) / std::max(1.0, std::abs(x[0])));
    }
    return Outcome{violations == 0 && reflex <= 1e-12,
                   "10000 draws, " + std::to_string(violations) + " violations, reflexivity err " + sci(reflex)};
  });

  report(3, "evaluator equivalence", [&] {
    double cont = 0;
    double jump = 0;
    std::size_t n_cont = 0;
    std::size_t n_jump = 0;
    while (n_cont < 1000 || n_jump < 200) {
      const auto& c = catalog[std::uniform_int_distribution<std::size_t>(0, catalog.size() - 1)(rng)];
      if (c.jumps ? n_jump >= 200 : n_cont >= 1000) continue;
      const std::size_t n = 2 + (n_cont + n_jump) % 3;
      const Interval d = c.domain.finite() ? c.domain : c.domain.working_window();
      std::vector<Expr> w;
      for (std::size_t i = 0; i < n; ++i) w.push_back(cases::random_weight(rng, d));
      const auto m = make_mean(c.f, w, d);
      const auto x = cases::random_tuple(rng, d, n);
      const double a = mean_direct(m, x);
      const double s = mean_by_sign_characterization(m, x);
      if (c.jumps) {
        jump = std::max(jump, std::abs(a - s));
        ++n_jump;
      } else {
        cont = std::max({cont, std::abs(a - s), std::abs(a - mean_by_root(m, x)), std::abs(s - mean_by_root(m, x))});
        ++n_cont;
      }
    }
    return Outcome{cont <= 1e-10 && jump <= 1e-10,
                   "1000 continuous max gap " + sci(cont) + ", 200 jump max gap " + sci(jump) + " (<= 1e-10)"};
  });

  std::vector<CanonicalDraw> draws;
  report(4, "canonical equality", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(k % 2);
      draws.push_back(canonical_draw(rng, n));
      const auto& d = draws.back();
      const double radius = 0.05 * d.left.domain().length();
      worst = std::max(worst, verify_equality_grid(d.left, d.right, n, 16, radius, 1e-9).max_residual);
    }
    const double secs = seconds_since(t0);
    return Outcome{worst <= 1e-9 && secs <= 30, "200 draws, n in {2,3}, max deviation " + sci(worst) + " (<= 1e-9)"};
  });

  report(5, "diagonal partials", [&] {
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const auto& d = draws[static_cast<std::size_t>(k)];
      const Interval I = d.left.domain();
      const double t = uniform(rng, I.lo() + 0.2 * I.length(), I.hi() - 0.2 * I.length());
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, d.left.arity() - 1)(rng);
      double p0 = 0;
      for (std::size_t j = 0; j < d.left.arity(); ++j) p0 += d.left.weights().eval(j, t);
      const double expected = d.left.weights().eval(i, t) / p0;
      const double got = diagonal_partial_extrapolated(d.left, i, t, 0.05 * I.length());
      worst = std::max(worst, std::abs(got - expected) / expected);
    }
    return Outcome{worst <= 1e-6, "100 draws, max rel err " + sci(worst) + " (<= 1e-6)"};
  });

  report(6, "fitter round trip", [&] {
    double theta_err = 0;
    double validation = 0;
    std::size_t failed = 0;
    for (const auto& d : draws) {
      try {
        const auto fit = fit_moebius(d.left, d.right, 16);
        theta_err = std::max(theta_err, fit.params.relative_error(d.theta));
        validation = std::max(validation, fit.validation.max_residual);
      } catch (const FitFailure& e) {
        ++failed;
        theta_err = std::max(theta_err, e.fit().params.relative_error(d.theta));
        validation = std::max(validation, e.fit().validation.max_residual);
      }
    }
    return Outcome{failed == 0 && theta_err <= 1e-6 && validation <= 1e-8,
                   "200 draws, " + std::to_string(failed) + " fit failures, theta rel err " + sci(theta_err) +
                       " (<= 1e-6), validation " + sci(validation) + " (<= 1e-8)"};
  });

  report(7, "necessary-condition chain", [&] {
    std::size_t fails = 0;
    std::string first_fail;
    double gamma_err = 0;
    for (const auto& d : draws) {
      const auto rs = reduce(d.left, d.right);
      const double radius = 0.05 * rs.J.working_window().length();
      const auto gamma = hprime_r2_constancy(rs, 16, 1e-7);
      const std::vector<DiagnosticResult> chain{
          first_order_condition(rs, 16), eq3_residual(rs, d.left.arity(), 16, radius, 1e-9),
          residual_ij(rs, 0, 1, 16, radius), gamma};
      const auto aff = affinity_of_r(rs, 16);
      for (const auto& c : chain) {
        if (!c.pass) {
          ++fails;
          if (first_fail.empty()) first_fail = c.name + "=" + sci(c.max_residual) + " on " + d.family;
        }
      }
      if (!aff.pass()) {
        ++fails;
        if (first_fail.empty()) first_fail = "affinity on " + d.family;
      }
      const double det = d.theta.determinant();
      gamma_err = std::max(gamma_err, std::abs(gamma.values.at("gamma") - det) / std::abs(det));
    }
    return Outcome{fails == 0 && gamma_err <= 1e-6,
                   std::to_string(fails) + " failing checks" + (first_fail.empty() ? "" : " (" + first_fail + ")") +
                       ", gamma rel err " + sci(gamma_err) + " (<= 1e-6)"};
  });

  report(8, "negative detection", [&] {
    const Interval I(0.5, 8);
    auto unit = [&](Expr f) { return make_mean(std::move(f), {ex::constant(1), ex::constant(1)}, I); };
    auto one = [](double) { return 1.0; };
    struct Negative {
      std::string name;
      MeanSpec left;
      MeanSpec right;
      std::function<double(const std::vector<double>&)> oracle_gap;
    };
    const auto sq = [](double x) { return x * x; };
    const auto lg = [](double x) { return std::log(x); };
    const auto id = [](double x) { return x; };
    const auto canon_g = [](double x) {
      const double u = std::log(x);
      return (2 * u - 1) / (0.5 * u + 3);
    };
    const SpecFile perturbed = load_spec(fixture("perturbed_right"));
    std::vector<Negative> negatives{
        {"arith/geom", unit(ex::identity()), unit(ex::log()),
         [&](const std::vector<double>& x) { return std::abs(oracle_mean(id, {one, one}, x) - oracle_mean(lg, {one, one}, x)); }},
        {"arith/quad", unit(ex::identity()), unit(ex::power(2)),
         [&](const std::vector<double>& x) { return std::abs(oracle_mean(id, {one, one}, x) - oracle_mean(sq, {one, one}, x)); }},
        {"perturbed canonical", load_spec(fixture("canonical_left")).to_mean(), perturbed.to_mean(),
         [&](const std::vector<double>& x) {
           auto factor = [](double t) { return 0.5 * std::log(t) + 3; };
           const double l = oracle_mean(lg, {one, id}, x);
           const double r = oracle_mean(canon_g, {factor, [&](double t) { return factor(t) * 1.1 * t; }}, x);
           return std::abs(l - r);
         }},
    };
    std::string detail;
    bool ok = true;
    for (const auto& neg : negatives) {
      DecideConfig cfg;
      cfg.pair = std::array<std::size_t, 2>{0, 1};
      const auto rep = decide_equality(neg.left, neg.right, cfg);
      const double gap = rep.verdict == Verdict::kNotEqual ? neg.oracle_gap(rep.witness) : 0;
      ok &= rep.verdict == Verdict::kNotEqual && gap > 1e-6;
      detail += neg.name + " gap " + sci(gap) + "; ";
    }
    DecideConfig cfg;
    const auto diags = run_diagnostics(load_spec(fixture("hsquare_left")).to_mean(),
                                       load_spec(fixture("hsquare_right")).to_mean(), cfg);
    const auto hrow = std::find_if(diags.begin(), diags.end(), [](const auto& d) { return d.name == "hprime_r2_constancy"; });
    const bool hfail = hrow != diags.end() && !hrow->pass;
    ok &= hfail;
    detail += std::string("h=u^2 constancy ") + (hfail ? "fails" : "PASSES");
    return Outcome{ok, detail};
  });

  report(9, "main-plus route", [&] {
    const auto left = load_spec(fixture("mainplus_left"));
    const auto right = load_spec(fixture("mainplus_right"));
    DecideConfig cfg;
    cfg.triple = left.regularity.triple;
    const auto rep = decide_equality(left.to_mean(), right.to_mean(), cfg);
    const MoebiusParams theta{1, 2, -0.25, 2};
    const double err = rep.fitted ? rep.fitted->relative_error(theta) : INFINITY;
    return Outcome{rep.verdict == Verdict::kEqual && rep.route == Route::kMainPlus && err <= 1e-6,
                   std::string("verdict ") + std::string(to_string(rep.verdict)) + ", theta rel err " + sci(err) +
                       " (<= 1e-6)"};
  });

  report(10, "restriction coherence", [&] {
    std::size_t failed = 0;
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      const auto d = canonical_draw(rng, 4);
      const double radius = 0.05 * d.left.domain().length();
      failed += !verify_equality_grid(d.left, d.right, 4, 8, radius, 1e-9).pass;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
          const std::vector<std::size_t> idx{i, j};
          const auto r = verify_equality_grid(restrict(d.left, idx), restrict(d.right, idx), 2, 8, radius, 1e-9);
          worst = std::max(worst, r.max_residual);
          failed += !r.pass;
        }
      }
    }
    return Outcome{failed == 0, "20 pairs x 6 restrictions, max deviation " + sci(worst) + " (<= 1e-9)"};
  });

  report(11, "CLI determinism and exit codes", [&] {
    if (cli.empty()) return Outcome{false, "no CLI path given"};
    const auto dir = std::filesystem::temp_directory_path();
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"canonical_left", "canonical_right"}, {"arithmetic", "geometric"}, {"canonical_left", "perturbed_right"},
        {"mainplus_left", "mainplus_right"}};
    bool identical = true;
    for (const auto& [l, r] : pairs) {
      std::vector<std::string> blobs;
      for (int rep = 0; rep < 2; ++rep) {
        const auto out = dir / ("bmeq_accept_" + std::to_string(rep) + ".json");
        run_cli_quiet(cli, "check --left " + fixture(l) + " --right " + fixture(r) + " --seed 42 --out " + out.string());
        blobs.push_back(slurp(out));
        std::filesystem::remove(out);
      }
      identical &= !blobs[0].empty() && blobs[0] == blobs[1];
    }
    auto code = [&](const std::string& l, const std::string& r) {
      return run_cli_quiet(cli, "check --left " + fixture(l) + " --right " + fixture(r));
    };
    const int equal = code("canonical_left", "canonical_right");
    const int not_equal = code("arithmetic", "geometric");
    const int inconclusive = code("arithmetic", "arithmetic");
    const int config = code("noreg_left", "canonical_right");
    const bool codes = equal == 0 && not_equal == 1 && inconclusive == 3 && config == 2;
    return Outcome{identical && codes, std::string("reports ") + (identical ? "byte-identical" : "DIFFER") +
                                           ", exit codes Equal=" + std::to_string(equal) + " NotEqual=" +
                                           std::to_string(not_equal) + " Inconclusive=" + std::to_string(inconclusive) +
                                           " config=" + std::to_string(config)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
