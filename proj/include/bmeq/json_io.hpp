#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "bmeq/equality.hpp"
#include "bmeq/expr.hpp"
#include "bmeq/interval.hpp"
#include "bmeq/means.hpp"

namespace bmeq {

using json = nlohmann::json;

/// Hypotheses declared alongside a mean. Indices are 0-based.
struct Regularity {
  std::vector<std::size_t> c1_indices;
  std::optional<Interval> subinterval;
  std::optional<std::array<std::size_t, 2>> pair;
  std::optional<std::array<std::size_t, 3>> triple;

  bool operator==(const Regularity&) const = default;
};

struct SpecFile {
  Interval interval{0, 1};
  Expr generator;
  std::vector<Expr> weights;
  Regularity regularity;

  MeanSpec to_mean() const;
};

/// Structural comparison; expressions are compared node by node.
bool equivalent(const SpecFile& lhs, const SpecFile& rhs);

/// Non-finite numbers become "inf", "-inf" or "nan".
json number_to_json(double v);
double number_from_json(const json& j);

json to_json(const Interval& iv);
Interval interval_from_json(const json& j);

json to_json(const Expr& e);
Expr expr_from_json(const json& j);

json to_json(const SpecFile& spec);
SpecFile spec_from_json(const json& j);
SpecFile load_spec(const std::filesystem::path& path);

json to_json(const MoebiusParams& p);
json to_json(const DiagnosticResult& d);
json to_json(const EqualityReport& report);

}  // namespace bmeq
