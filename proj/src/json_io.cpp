#include "bmeq/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <type_traits>

namespace bmeq {

namespace {

[[noreturn]] void parse_error(const std::string& what) { fail(ErrorKind::kParse, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number_field(const json& j, const char* key) { return number_from_json(field(j, key)); }

std::vector<Expr> expr_list(const json& j, const char* key) {
  const json& arr = field(j, key);
  if (!arr.is_array()) parse_error(std::string("field '") + key + "' must be an array");
  std::vector<Expr> out;
  for (const auto& item : arr) out.push_back(expr_from_json(item));
  return out;
}

std::size_t index_from_json(const json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    parse_error("indices must be non-negative integers");
  }
  return j.get<std::size_t>();
}

template <std::size_t N>
std::array<std::size_t, N> index_array(const json& j, const char* key) {
  if (!j.is_array() || j.size() != N) {
    parse_error(std::string("'") + key + "' must list " + std::to_string(N) + " indices");
  }
  std::array<std::size_t, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = index_from_json(j[k]);
  return out;
}

json list_to_json(const std::vector<Expr>& items) {
  json arr = json::array();
  for (const auto& e : items) arr.push_back(to_json(e));
  return arr;
}

}  // namespace

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  parse_error("expected a number, got " + j.dump());
}

json to_json(const Interval& iv) { return json::array({number_to_json(iv.lo()), number_to_json(iv.hi())}); }

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("an interval is a two-element array");
  try {
    return Interval(number_from_json(j[0]), number_from_json(j[1]));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    parse_error(e.what());
  }
}

json to_json(const Expr& e) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Identity>) {
          return {{"kind", "identity"}};
        } else if constexpr (std::is_same_v<T, node::Constant>) {
          return {{"kind", "const"}, {"value", number_to_json(n.value)}};
        } else if constexpr (std::is_same_v<T, node::Affine>) {
          return {{"kind", "affine"}, {"alpha", n.alpha}, {"beta", n.beta}, {"inner", to_json(n.inner)}};
        } else if constexpr (std::is_same_v<T, node::Power>) {
          return {{"kind", "power"}, {"exponent", n.exponent}};
        } else if constexpr (std::is_same_v<T, node::Exp>) {
          return {{"kind", "exp"}};
        } else if constexpr (std::is_same_v<T, node::Log>) {
          return {{"kind", "log"}};
        } else if constexpr (std::is_same_v<T, node::Reciprocal>) {
          return {{"kind", "reciprocal"}};
        } else if constexpr (std::is_same_v<T, node::Moebius>) {
          return {{"kind", "moebius"}, {"a", n.a}, {"b", n.b}, {"c", n.c}, {"d", n.d},
                  {"inner", to_json(n.inner)}};
        } else if constexpr (std::is_same_v<T, node::Compose>) {
          return {{"kind", "compose"}, {"outer", to_json(n.outer)}, {"inner", to_json(n.inner)}};
        } else if constexpr (std::is_same_v<T, node::Piecewise>) {
          json owners = json::array();
          for (auto o : n.ownership) owners.push_back(o == Owner::kLeft ? "left" : "right");
          return {{"kind", "piecewise"},
                  {"breakpoints", n.breakpoints},
                  {"branches", list_to_json(n.branches)},
                  {"ownership", owners}};
        } else if constexpr (std::is_same_v<T, node::Sum>) {
          return {{"kind", "sum"}, {"terms", list_to_json(n.terms)}};
        } else if constexpr (std::is_same_v<T, node::Product>) {
          return {{"kind", "product"}, {"factors", list_to_json(n.factors)}};
        } else if constexpr (std::is_same_v<T, node::Quotient>) {
          return {{"kind", "quotient"},
                  {"numerator", to_json(n.numerator)},
                  {"denominator", to_json(n.denominator)}};
        } else {
          return {{"kind", "inverse"}, {"of", to_json(n.of)}, {"domain", to_json(n.domain)}};
        }
      },
      e.node().value);
}

Expr expr_from_json(const json& j) {
  if (!j.is_object()) parse_error("an expression is a JSON object, got " + j.dump());
  const json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) parse_error("'kind' must be a string");
  const auto kind = kind_field.get<std::string>();
  try {
    if (kind == "identity") return ex::identity();
    if (kind == "const") return ex::constant(number_field(j, "value"));
    if (kind == "affine") {
      const Expr inner = j.contains("inner") ? expr_from_json(j["inner"]) : ex::identity();
      return ex::affine(number_field(j, "alpha"), number_field(j, "beta"), inner);
    }
    if (kind == "power") return ex::power(number_field(j, "exponent"));
    if (kind == "exp") return ex::exp();
    if (kind == "log") return ex::log();
    if (kind == "reciprocal") return ex::reciprocal();
    if (kind == "moebius") {
      const Expr inner = j.contains("inner") ? expr_from_json(j["inner"]) : ex::identity();
      return ex::moebius(number_field(j, "a"), number_field(j, "b"), number_field(j, "c"),
                         number_field(j, "d"), inner);
    }
    if (kind == "compose") {
      return ex::compose(expr_from_json(field(j, "outer")), expr_from_json(field(j, "inner")));
    }
    if (kind == "piecewise") {
      const json& bps = field(j, "breakpoints");
      if (!bps.is_array()) parse_error("'breakpoints' must be an array");
      std::vector<double> breakpoints;
      for (const auto& b : bps) breakpoints.push_back(number_from_json(b));
      std::vector<Owner> ownership;
      if (j.contains("ownership")) {
        for (const auto& o : j["ownership"]) {
          const auto s = o.is_string() ? o.get<std::string>() : std::string();
          if (s != "left" && s != "right") parse_error("ownership entries are \"left\" or \"right\"");
          ownership.push_back(s == "left" ? Owner::kLeft : Owner::kRight);
        }
      }
      return ex::piecewise(std::move(breakpoints), expr_list(j, "branches"), std::move(ownership));
    }
    if (kind == "sum") return ex::sum(expr_list(j, "terms"));
    if (kind == "product") return ex::product(expr_list(j, "factors"));
    if (kind == "quotient") {
      return ex::quotient(expr_from_json(field(j, "numerator")),
                          expr_from_json(field(j, "denominator")));
    }
    if (kind == "inverse") {
      return ex::numeric_inverse(expr_from_json(field(j, "of")),
                                 interval_from_json(field(j, "domain")));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    parse_error("invalid '" + kind + "' node: " + e.what());
  }
  parse_error("unknown expression kind '" + kind + "'");
}

MeanSpec SpecFile::to_mean() const { return make_mean(generator, weights, interval); }

bool equivalent(const SpecFile& lhs, const SpecFile& rhs) {
  if (!(lhs.interval == rhs.interval) || !(lhs.regularity == rhs.regularity)) return false;
  if (!structurally_equal(lhs.generator, rhs.generator)) return false;
  if (lhs.weights.size() != rhs.weights.size()) return false;
  for (std::size_t i = 0; i < lhs.weights.size(); ++i) {
    if (!structurally_equal(lhs.weights[i], rhs.weights[i])) return false;
  }
  return true;
}

json to_json(const SpecFile& spec) {
  json j{{"interval", to_json(spec.interval)},
         {"generator", to_json(spec.generator)},
         {"weights", list_to_json(spec.weights)}};
  const auto& reg = spec.regularity;
  json r = json::object();
  if (!reg.c1_indices.empty()) r["c1_indices"] = reg.c1_indices;
  if (reg.subinterval) r["subinterval"] = to_json(*reg.subinterval);
  if (reg.pair) r["pair"] = *reg.pair;
  if (reg.triple) r["triple"] = *reg.triple;
  if (!r.empty()) j["regularity"] = r;
  return j;
}

SpecFile spec_from_json(const json& j) {
  SpecFile spec;
  spec.interval = interval_from_json(field(j, "interval"));
  spec.generator = expr_from_json(field(j, "generator"));
  spec.weights = expr_list(j, "weights");
  if (spec.weights.size() < 2) parse_error("a spec needs at least two weights");
  if (j.contains("regularity")) {
    const json& r = j["regularity"];
    if (!r.is_object()) parse_error("'regularity' must be an object");
    if (r.contains("c1_indices")) {
      if (!r["c1_indices"].is_array()) parse_error("'c1_indices' must be an array");
      for (const auto& i : r["c1_indices"]) spec.regularity.c1_indices.push_back(index_from_json(i));
    }
    if (r.contains("subinterval")) spec.regularity.subinterval = interval_from_json(r["subinterval"]);
    if (r.contains("pair")) spec.regularity.pair = index_array<2>(r["pair"], "pair");
    if (r.contains("triple")) spec.regularity.triple = index_array<3>(r["triple"], "triple");
  }
  return spec;
}

SpecFile load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open spec file " + path.string());
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

json to_json(const MoebiusParams& p) {
  return {{"a", number_to_json(p.a)},
          {"b", number_to_json(p.b)},
          {"c", number_to_json(p.c)},
          {"d", number_to_json(p.d)}};
}

json to_json(const DiagnosticResult& d) {
  json witness = json::array();
  for (double w : d.witness) witness.push_back(number_to_json(w));
  json values = json::object();
  for (const auto& [k, v] : d.values) values[k] = number_to_json(v);
  return {{"name", d.name},
          {"max_residual", number_to_json(d.max_residual)},
          {"threshold", number_to_json(d.threshold)},
          {"pass", d.pass},
          {"witness", witness},
          {"values", values}};
}

json to_json(const EqualityReport& report) {
  json diags = json::array();
  for (const auto& d : report.diagnostics) diags.push_back(to_json(d));
  json witness = json::array();
  for (double w : report.witness) witness.push_back(number_to_json(w));
  return {{"verdict", to_string(report.verdict)},
          {"params", report.fitted ? to_json(*report.fitted) : json(nullptr)},
          {"diagnostics", diags},
          {"interval", to_json(report.interval)},
          {"n", report.n},
          {"grid", report.grid},
          {"radius", number_to_json(report.radius)},
          {"route", to_string(report.route)},
          {"indices", report.indices},
          {"subinterval", report.subinterval ? to_json(*report.subinterval) : json(nullptr)},
          {"witness", witness}};
}

}  // namespace bmeq
