#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "bmeq/interval.hpp"

namespace bmeq {

enum class Owner { kLeft, kRight };

struct Node;

/// Immutable expression tree describing a real function of one variable.
///
/// Evaluation is pure and thread-safe. `eval` throws DomainError when the
/// point is outside the node's natural domain or the value is not finite;
/// `eval_unchecked` follows IEEE semantics (used for one-sided limits).
class Expr {
 public:
  /// The identity function.
  Expr();
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  double eval_unchecked(double x) const;
  /// Closed-form derivative by node-wise chain rule.
  double derivative(double x) const;

  const Node& node() const noexcept { return *node_; }
  std::string_view kind_name() const noexcept;

 private:
  std::shared_ptr<const Node> node_;
};

namespace node {

struct Identity {};
struct Constant {
  double value;
};
struct Affine {
  double alpha;
  double beta;
  Expr inner;
};
/// x^exponent; x > 0 always allowed, x == 0 if exponent > 0, x < 0 if the
/// exponent is an integer.
struct Power {
  double exponent;
};
struct Exp {};
struct Log {};
struct Reciprocal {};
/// (a*u + b) / (c*u + d) with u = inner(x).
struct Moebius {
  double a, b, c, d;
  Expr inner;
};
struct Compose {
  Expr outer;
  Expr inner;
};
/// branches[k] applies on (breakpoints[k-1], breakpoints[k]); breakpoint k
/// belongs to branch k (kLeft) or k+1 (kRight).
struct Piecewise {
  std::vector<double> breakpoints;
  std::vector<Expr> branches;
  std::vector<Owner> ownership;
};
struct Sum {
  std::vector<Expr> terms;
};
struct Product {
  std::vector<Expr> factors;
};
struct Quotient {
  Expr numerator;
  Expr denominator;
};
/// Inverse of a strictly monotone `of` restricted to `domain`, evaluated by
/// bisection. `range` is the closed hull of of(domain).
struct Inverse {
  Expr of;
  Interval domain;
  Interval range;
  bool increasing;
};

}  // namespace node

struct Node {
  std::variant<node::Identity, node::Constant, node::Affine, node::Power,
               node::Exp, node::Log, node::Reciprocal, node::Moebius,
               node::Compose, node::Piecewise, node::Sum, node::Product,
               node::Quotient, node::Inverse>
      value;
};

/// Factories. All validate their parameters and throw on malformed input.
namespace ex {

Expr identity();
Expr constant(double value);
Expr affine(double alpha, double beta, Expr inner = identity());
Expr power(double exponent);
Expr exp();
Expr log();
Expr reciprocal();
Expr moebius(double a, double b, double c, double d, Expr inner = identity());
Expr compose(Expr outer, Expr inner);
Expr piecewise(std::vector<double> breakpoints, std::vector<Expr> branches,
               std::vector<Owner> ownership = {});
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr quotient(Expr numerator, Expr denominator);
/// Numeric inverse of `of` on `domain`; direction and range found by
/// evaluating one-sided limits at the ends.
Expr numeric_inverse(Expr of, const Interval& domain);

}  // namespace ex

/// Closed-form inverse when every node on the path has one (identity,
/// affine, power, exp, log, reciprocal, moebius, compose, inverse).
std::optional<Expr> closed_form_inverse(const Expr& e);

/// One-sided limit of `e` at `x` (may be +-inf). side > 0 approaches from
/// above, side < 0 from below. Uses the IEEE value at `x` when it is not NaN,
/// otherwise evaluates along a geometric sequence approaching `x`.
double one_sided_limit(const Expr& e, double x, int side);

/// True if a Piecewise node occurs anywhere in the tree.
bool contains_piecewise(const Expr& e);

/// Structural equality (exact parameter comparison).
bool structurally_equal(const Expr& lhs, const Expr& rhs);

}  // namespace bmeq
