#include "bmeq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmeq/equality.hpp"
#include "bmeq/json_io.hpp"

namespace bmeq {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotEqual = 1;
constexpr int kExitError = 2;
constexpr int kExitInconclusive = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> xs;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, end - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    double v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      fail(ErrorKind::kParse, "cannot parse coordinate '" + item + "'");
    }
    xs.push_back(v);
    start = end + 1;
  }
  return xs;
}

struct RunOptions {
  std::string spec;
  std::string left;
  std::string right;
  std::string point;
  double value = 0;
  std::size_t n = 0;
  std::size_t grid = 16;
  double radius = 0.05;
  double tol = 1e-9;
  std::string route = "auto";
  std::uint64_t seed = 42;
  std::string out_path;
};

void write_json(const std::string& path, const json& j) {
  std::ofstream file(path);
  if (!file) fail(ErrorKind::kConfig, "cannot write " + path);
  file << j.dump(2) << '\n';
}

DecideConfig make_config(const RunOptions& opt, const SpecFile& left, const SpecFile& right) {
  static const std::map<std::string, Route> routes{
      {"main", Route::kMain}, {"main-plus", Route::kMainPlus}, {"auto", Route::kAuto}};
  DecideConfig cfg;
  cfg.route = routes.at(opt.route);
  // Declarations on the left spec take precedence.
  const Regularity& reg = left.regularity;
  const Regularity& alt = right.regularity;
  cfg.pair = reg.pair ? reg.pair : alt.pair;
  cfg.triple = reg.triple ? reg.triple : alt.triple;
  cfg.subinterval = reg.subinterval ? reg.subinterval : alt.subinterval;
  cfg.n = opt.n;
  cfg.grid = opt.grid;
  cfg.radius_fraction = opt.radius;
  cfg.seed = opt.seed;
  cfg.thresholds.equality = opt.tol;
  const std::size_t arity = left.weights.size();
  if (cfg.route == Route::kMainPlus && arity < 3) {
    fail(ErrorKind::kConfig, "route main-plus needs n >= 3");
  }
  return cfg;
}

void print_diagnostics(std::ostream& out, const std::vector<DiagnosticResult>& diags) {
  for (const auto& d : diags) {
    out << d.name << "  residual=" << fmt(d.max_residual) << "  threshold=" << fmt(d.threshold)
        << "  " << (d.pass ? "pass" : "FAIL");
    if (!d.witness.empty()) out << "  witness=(" << fmt_list(d.witness) << ")";
    out << '\n';
  }
}

int cmd_eval(const RunOptions& opt, std::ostream& out) {
  const MeanSpec m = load_spec(opt.spec).to_mean();
  const auto x = parse_point(opt.point);
  if (x.size() != m.arity()) {
    fail(ErrorKind::kDomain, "point has " + std::to_string(x.size()) +
                                 " coordinates, the mean takes " + std::to_string(m.arity()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!m.domain().contains(x[i])) {
      fail(ErrorKind::kDomain, "coordinate " + std::to_string(i) + " (" + fmt(x[i]) +
                                   ") lies outside " + m.domain().to_string());
    }
  }
  out << fmt(mean_direct(m, x)) << '\n';
  return kExitOk;
}

int cmd_invert(const RunOptions& opt, std::ostream& out) {
  const MeanSpec m = load_spec(opt.spec).to_mean();
  out << fmt(m.inverse().eval(opt.value)) << '\n';
  return kExitOk;
}

int cmd_check(const RunOptions& opt, std::ostream& out) {
  const SpecFile left = load_spec(opt.left);
  const SpecFile right = load_spec(opt.right);
  const DecideConfig cfg = make_config(opt, left, right);
  const EqualityReport report = decide_equality(left.to_mean(), right.to_mean(), cfg);

  out << "verdict: " << to_string(report.verdict) << '\n';
  out << "route: " << to_string(report.route);
  if (!report.indices.empty()) {
    out << "  indices:";
    for (auto i : report.indices) out << ' ' << i;
  }
  out << '\n';
  if (report.subinterval) out << "subinterval: " << report.subinterval->to_string() << '\n';
  if (report.fitted) {
    const auto& p = *report.fitted;
    out << "params: a=" << fmt(p.a) << " b=" << fmt(p.b) << " c=" << fmt(p.c)
        << " d=" << fmt(p.d) << '\n';
  }
  if (!report.witness.empty()) out << "witness: (" << fmt_list(report.witness) << ")\n";
  print_diagnostics(out, report.diagnostics);
  if (!opt.out_path.empty()) write_json(opt.out_path, to_json(report));

  switch (report.verdict) {
    case Verdict::kEqual: return kExitOk;
    case Verdict::kNotEqual: return kExitNotEqual;
    case Verdict::kInconclusive: return kExitInconclusive;
  }
  return kExitError;
}

int cmd_diagnose(const RunOptions& opt, std::ostream& out) {
  const SpecFile left = load_spec(opt.left);
  const SpecFile right = load_spec(opt.right);
  const DecideConfig cfg = make_config(opt, left, right);
  const auto diags = run_diagnostics(left.to_mean(), right.to_mean(), cfg);
  print_diagnostics(out, diags);
  if (!opt.out_path.empty()) {
    json arr = json::array();
    for (const auto& d : diags) arr.push_back(to_json(d));
    write_json(opt.out_path, json{{"diagnostics", arr}});
  }
  const bool ok = std::all_of(diags.begin(), diags.end(), [](const auto& d) { return d.pass; });
  return ok ? kExitOk : kExitNotEqual;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Bajraktarevic means: evaluation and equality decisions", "bmeq"};
  app.require_subcommand(1);
  RunOptions opt;

  auto* eval = app.add_subcommand("eval", "Evaluate the mean of a spec at a point");
  eval->add_option("--spec", opt.spec, "Spec file")->required();
  eval->add_option("--point", opt.point, "Comma-separated coordinates")->required();

  auto* invert = app.add_subcommand("invert", "Evaluate the generalized left inverse");
  invert->add_option("--spec", opt.spec, "Spec file")->required();
  invert->add_option("--value", opt.value, "Value in the range hull")->required();

  auto* check = app.add_subcommand("check", "Decide whether two means are equal");
  auto* diagnose = app.add_subcommand("diagnose", "Print every necessary-condition diagnostic");
  for (auto* sub : {check, diagnose}) {
    sub->add_option("--left", opt.left, "Left spec file")->required();
    sub->add_option("--right", opt.right, "Right spec file")->required();
    sub->add_option("--n", opt.n, "Tuple arity (defaults to the number of weights)");
    sub->add_option("--grid", opt.grid, "Diagonal base points")->check(CLI::Range(3, 100000));
    sub->add_option("--radius", opt.radius, "Perturbation radius as a fraction of the window")
        ->check(CLI::Range(1e-12, 0.49));
    sub->add_option("--tol", opt.tol, "Equality tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--route", opt.route, "Decision route")
        ->check(CLI::IsMember({"main", "main-plus", "auto"}));
    sub->add_option("--seed", opt.seed, "Seed for the random stage");
    sub->add_option("--out", opt.out_path, "Write a JSON report to this path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*eval) return cmd_eval(opt, out);
    if (*invert) return cmd_invert(opt, out);
    if (*check) return cmd_check(opt, out);
    return cmd_diagnose(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace bmeq
