#include "bmeq/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmeq/error.hpp"
#include "bmeq/numerics.hpp"

namespace bmeq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void undefined_at(std::string_view what, double x) {
  std::ostringstream os;
  os.precision(17);
  os << what << " undefined at x = " << x;
  fail(ErrorKind::kDomain, os.str());
}

bool power_defined(double exponent, double x) {
  if (x > 0) return true;
  if (x == 0) return exponent > 0;
  return std::trunc(exponent) == exponent;
}

Expr make(auto&& value) {
  return Expr(std::make_shared<const Node>(Node{std::forward<decltype(value)>(value)}));
}

bool is_identity(const Expr& e) {
  return std::holds_alternative<node::Identity>(e.node().value);
}

// outer(inner(x)), dropping identities.
Expr chain(Expr outer, Expr inner) {
  if (is_identity(inner)) return outer;
  if (is_identity(outer)) return inner;
  return ex::compose(std::move(outer), std::move(inner));
}

std::size_t select_branch(const node::Piecewise& pw, double x) {
  const auto it = std::lower_bound(pw.breakpoints.begin(), pw.breakpoints.end(), x);
  const auto k = static_cast<std::size_t>(it - pw.breakpoints.begin());
  if (it != pw.breakpoints.end() && *it == x) {
    return pw.ownership[k] == Owner::kLeft ? k : k + 1;
  }
  return k;
}

bool is_breakpoint(const node::Piecewise& pw, double x) {
  return std::binary_search(pw.breakpoints.begin(), pw.breakpoints.end(), x);
}

double invert_node(const node::Inverse& inv, double y) {
  const double v = numerics::invert_monotone(
      [&](double x) { return inv.of.eval_unchecked(x); }, y, inv.domain, inv.increasing);
  return std::clamp(v, inv.domain.lo(), inv.domain.hi());
}

template <bool Checked>
double evaluate(const Node& n, double x);

template <bool Checked>
double evaluate(const Expr& e, double x) {
  return evaluate<Checked>(e.node(), x);
}

template <bool Checked>
double evaluate(const Node& n, double x) {
  const double value = std::visit(
      overloaded{
          [&](const node::Identity&) { return x; },
          [&](const node::Constant& c) { return c.value; },
          [&](const node::Affine& a) { return a.alpha * evaluate<Checked>(a.inner, x) + a.beta; },
          [&](const node::Power& p) {
            if (Checked && !power_defined(p.exponent, x)) undefined_at("power", x);
            return std::pow(x, p.exponent);
          },
          [&](const node::Exp&) { return std::exp(x); },
          [&](const node::Log&) {
            if (Checked && !(x > 0)) undefined_at("log", x);
            return std::log(x);
          },
          [&](const node::Reciprocal&) {
            if (Checked && x == 0) undefined_at("reciprocal", x);
            return 1 / x;
          },
          [&](const node::Moebius& m) {
            const double u = evaluate<Checked>(m.inner, x);
            const double den = m.c * u + m.d;
            if (Checked && den == 0) undefined_at("moebius", x);
            return (m.a * u + m.b) / den;
          },
          [&](const node::Compose& c) {
            return evaluate<Checked>(c.outer, evaluate<Checked>(c.inner, x));
          },
          [&](const node::Piecewise& pw) {
            return evaluate<Checked>(pw.branches[select_branch(pw, x)], x);
          },
          [&](const node::Sum& s) {
            double total = 0;
            for (const auto& t : s.terms) total += evaluate<Checked>(t, x);
            return total;
          },
          [&](const node::Product& p) {
            double total = 1;
            for (const auto& f : p.factors) total *= evaluate<Checked>(f, x);
            return total;
          },
          [&](const node::Quotient& q) {
            const double den = evaluate<Checked>(q.denominator, x);
            if (Checked && den == 0) undefined_at("quotient", x);
            return evaluate<Checked>(q.numerator, x) / den;
          },
          [&](const node::Inverse& inv) {
            if (Checked && !inv.range.contains_closed(x)) undefined_at("inverse", x);
            return invert_node(inv, x);
          },
      },
      n.value);
  if (Checked && !std::isfinite(value)) undefined_at("expression (non-finite value)", x);
  return value;
}

double differentiate(const Expr& e, double x) {
  return std::visit(
      overloaded{
          [&](const node::Identity&) { return 1.0; },
          [&](const node::Constant&) { return 0.0; },
          [&](const node::Affine& a) { return a.alpha * differentiate(a.inner, x); },
          [&](const node::Power& p) {
            if (!power_defined(p.exponent, x) || (x == 0 && p.exponent < 1)) {
              undefined_at("power derivative", x);
            }
            return p.exponent * std::pow(x, p.exponent - 1);
          },
          [&](const node::Exp&) { return std::exp(x); },
          [&](const node::Log&) {
            if (!(x > 0)) undefined_at("log derivative", x);
            return 1 / x;
          },
          [&](const node::Reciprocal&) {
            if (x == 0) undefined_at("reciprocal derivative", x);
            return -1 / (x * x);
          },
          [&](const node::Moebius& m) {
            const double u = m.inner.eval(x);
            const double den = m.c * u + m.d;
            if (den == 0) undefined_at("moebius derivative", x);
            return (m.a * m.d - m.b * m.c) / (den * den) * differentiate(m.inner, x);
          },
          [&](const node::Compose& c) {
            return differentiate(c.outer, c.inner.eval(x)) * differentiate(c.inner, x);
          },
          [&](const node::Piecewise& pw) {
            if (is_breakpoint(pw, x)) {
              std::ostringstream os;
              os.precision(17);
              os << "x = " << x << " is a breakpoint";
              fail(ErrorKind::kNotDifferentiable, os.str());
            }
            return differentiate(pw.branches[select_branch(pw, x)], x);
          },
          [&](const node::Sum& s) {
            double total = 0;
            for (const auto& t : s.terms) total += differentiate(t, x);
            return total;
          },
          [&](const node::Product& p) {
            double total = 0;
            for (std::size_t i = 0; i < p.factors.size(); ++i) {
              double term = differentiate(p.factors[i], x);
              for (std::size_t j = 0; j < p.factors.size(); ++j) {
                if (j != i) term *= p.factors[j].eval(x);
              }
              total += term;
            }
            return total;
          },
          [&](const node::Quotient& q) {
            const double num = q.numerator.eval(x);
            const double den = q.denominator.eval(x);
            if (den == 0) undefined_at("quotient derivative", x);
            return (differentiate(q.numerator, x) * den - num * differentiate(q.denominator, x)) /
                   (den * den);
          },
          [&](const node::Inverse& inv) {
            if (!inv.range.contains_closed(x)) undefined_at("inverse derivative", x);
            const double slope = differentiate(inv.of, invert_node(inv, x));
            if (slope == 0) fail(ErrorKind::kNotDifferentiable, "inverse of a flat point");
            return 1 / slope;
          },
      },
      e.node().value);
}

}  // namespace

Expr::Expr() : node_(std::make_shared<const Node>(Node{node::Identity{}})) {}

double Expr::eval(double x) const { return evaluate<true>(*node_, x); }

double Expr::eval_unchecked(double x) const { return evaluate<false>(*node_, x); }

double Expr::derivative(double x) const {
  const double d = differentiate(*this, x);
  if (!std::isfinite(d)) undefined_at("derivative (non-finite value)", x);
  return d;
}

std::string_view Expr::kind_name() const noexcept {
  return std::visit(overloaded{
                        [](const node::Identity&) { return "identity"; },
                        [](const node::Constant&) { return "const"; },
                        [](const node::Affine&) { return "affine"; },
                        [](const node::Power&) { return "power"; },
                        [](const node::Exp&) { return "exp"; },
                        [](const node::Log&) { return "log"; },
                        [](const node::Reciprocal&) { return "reciprocal"; },
                        [](const node::Moebius&) { return "moebius"; },
                        [](const node::Compose&) { return "compose"; },
                        [](const node::Piecewise&) { return "piecewise"; },
                        [](const node::Sum&) { return "sum"; },
                        [](const node::Product&) { return "product"; },
                        [](const node::Quotient&) { return "quotient"; },
                        [](const node::Inverse&) { return "inverse"; },
                    },
                    node_->value);
}

namespace ex {

Expr identity() { return Expr(); }

Expr constant(double value) {
  if (!std::isfinite(value)) fail(ErrorKind::kDomain, "constant must be finite");
  return make(node::Constant{value});
}

Expr affine(double alpha, double beta, Expr inner) {
  if (!(std::isfinite(alpha) && std::isfinite(beta)) || alpha == 0) {
    fail(ErrorKind::kDomain, "affine needs finite beta and finite nonzero alpha");
  }
  return make(node::Affine{alpha, beta, std::move(inner)});
}

Expr power(double exponent) {
  if (!std::isfinite(exponent) || exponent == 0) {
    fail(ErrorKind::kDomain, "power needs a finite nonzero exponent");
  }
  return make(node::Power{exponent});
}

Expr exp() { return make(node::Exp{}); }
Expr log() { return make(node::Log{}); }
Expr reciprocal() { return make(node::Reciprocal{}); }

Expr moebius(double a, double b, double c, double d, Expr inner) {
  for (double v : {a, b, c, d}) {
    if (!std::isfinite(v)) fail(ErrorKind::kDomain, "moebius coefficients must be finite");
  }
  const double ad = a * d;
  const double bc = b * c;
  if (!(std::abs(ad - bc) > 1e-12 * std::max({std::abs(ad), std::abs(bc), 1.0}))) {
    fail(ErrorKind::kDomain, "moebius needs ad != bc");
  }
  return make(node::Moebius{a, b, c, d, std::move(inner)});
}

Expr compose(Expr outer, Expr inner) {
  return make(node::Compose{std::move(outer), std::move(inner)});
}

Expr piecewise(std::vector<double> breakpoints, std::vector<Expr> branches,
               std::vector<Owner> ownership) {
  if (branches.size() != breakpoints.size() + 1) {
    fail(ErrorKind::kParse, "piecewise needs exactly one more branch than breakpoints");
  }
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!std::isfinite(breakpoints[k]) || (k > 0 && !(breakpoints[k - 1] < breakpoints[k]))) {
      fail(ErrorKind::kParse, "piecewise breakpoints must be finite and strictly increasing");
    }
  }
  if (ownership.empty()) ownership.assign(breakpoints.size(), Owner::kRight);
  if (ownership.size() != breakpoints.size()) {
    fail(ErrorKind::kParse, "piecewise ownership must match breakpoints");
  }
  return make(node::Piecewise{std::move(breakpoints), std::move(branches), std::move(ownership)});
}

Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) fail(ErrorKind::kParse, "sum needs at least one term");
  if (terms.size() == 1) return terms.front();
  return make(node::Sum{std::move(terms)});
}

Expr product(std::vector<Expr> factors) {
  if (factors.empty()) fail(ErrorKind::kParse, "product needs at least one factor");
  if (factors.size() == 1) return factors.front();
  return make(node::Product{std::move(factors)});
}

Expr quotient(Expr numerator, Expr denominator) {
  return make(node::Quotient{std::move(numerator), std::move(denominator)});
}

Expr numeric_inverse(Expr of, const Interval& domain) {
  const double at_lo = one_sided_limit(of, domain.lo(), +1);
  const double at_hi = one_sided_limit(of, domain.hi(), -1);
  if (std::isnan(at_lo) || std::isnan(at_hi) || at_lo == at_hi) {
    fail(ErrorKind::kNotMonotone, "numeric_inverse needs a strictly monotone function on " +
                                      domain.to_string());
  }
  const bool increasing = at_lo < at_hi;
  Interval range(std::min(at_lo, at_hi), std::max(at_lo, at_hi));
  return make(node::Inverse{std::move(of), domain, range, increasing});
}

}  // namespace ex

std::optional<Expr> closed_form_inverse(const Expr& e) {
  return std::visit(
      overloaded{
          [](const node::Identity&) -> std::optional<Expr> { return ex::identity(); },
          [](const node::Constant&) -> std::optional<Expr> { return std::nullopt; },
          [](const node::Affine& a) -> std::optional<Expr> {
            auto inner = closed_form_inverse(a.inner);
            if (!inner) return std::nullopt;
            // (y - beta) / alpha, exact division rather than multiplication by 1/alpha.
            return chain(*inner, ex::moebius(1, -a.beta, 0, a.alpha));
          },
          [](const node::Power& p) -> std::optional<Expr> { return ex::power(1 / p.exponent); },
          [](const node::Exp&) -> std::optional<Expr> { return ex::log(); },
          [](const node::Log&) -> std::optional<Expr> { return ex::exp(); },
          [](const node::Reciprocal&) -> std::optional<Expr> { return ex::reciprocal(); },
          [](const node::Moebius& m) -> std::optional<Expr> {
            auto inner = closed_form_inverse(m.inner);
            if (!inner) return std::nullopt;
            return chain(*inner, ex::moebius(m.d, -m.b, -m.c, m.a));
          },
          [](const node::Compose& c) -> std::optional<Expr> {
            auto outer = closed_form_inverse(c.outer);
            auto inner = closed_form_inverse(c.inner);
            if (!outer || !inner) return std::nullopt;
            return chain(*inner, *outer);
          },
          [](const node::Piecewise&) -> std::optional<Expr> { return std::nullopt; },
          [](const node::Sum&) -> std::optional<Expr> { return std::nullopt; },
          [](const node::Product&) -> std::optional<Expr> { return std::nullopt; },
          [](const node::Quotient&) -> std::optional<Expr> { return std::nullopt; },
          [](const node::Inverse& inv) -> std::optional<Expr> { return inv.of; },
      },
      e.node().value);
}

double one_sided_limit(const Expr& e, double x, int side) {
  if (const auto* pw = std::get_if<node::Piecewise>(&e.node().value); pw && std::isfinite(x)) {
    const auto it = std::lower_bound(pw->breakpoints.begin(), pw->breakpoints.end(), x);
    if (it != pw->breakpoints.end() && *it == x) {
      const auto k = static_cast<std::size_t>(it - pw->breakpoints.begin());
      return one_sided_limit(pw->branches[side > 0 ? k + 1 : k], x, side);
    }
  }
  const double dir = side > 0 ? 1.0 : -1.0;
  const double at = (x == 0) ? std::copysign(0.0, dir) : x;
  const double v0 = e.eval_unchecked(at);
  if (std::isfinite(x)) {
    if (std::isfinite(v0)) return v0;
    const double near = std::nextafter(x, dir * kInf);
    const double v1 = e.eval_unchecked(near);
    if (std::isinf(v0)) {
      // Poles: IEEE picks the sign of the zero it computed, not of the approach.
      if (std::isfinite(v1) && v1 != 0 && std::signbit(v1) != std::signbit(v0)) return -v0;
      return v0;
    }
    // NaN at x: walk towards x.
    const double scale = std::max(1.0, std::abs(x));
    double last = std::numeric_limits<double>::quiet_NaN();
    double previous = last;
    for (int k = 1; k < 1100; ++k) {
      const double p = x + dir * std::ldexp(scale, -k);
      if (p == x) break;
      const double v = e.eval_unchecked(p);
      if (!std::isnan(v)) {
        previous = last;
        last = v;
      }
    }
    if (std::isfinite(last) && std::isfinite(previous) && std::abs(last) > 1e12 &&
        std::abs(last) > 1.5 * std::abs(previous)) {
      return std::copysign(kInf, last);
    }
    return last;
  }
  if (!std::isnan(v0)) return v0;
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= 1023; ++k) {
    const double v = e.eval_unchecked(std::copysign(std::ldexp(1.0, k), x));
    if (!std::isnan(v)) last = v;
  }
  if (std::abs(last) > 1e300) return std::copysign(kInf, last);
  return last;
}

bool contains_piecewise(const Expr& e) {
  return std::visit(
      overloaded{
          [](const node::Affine& a) { return contains_piecewise(a.inner); },
          [](const node::Moebius& m) { return contains_piecewise(m.inner); },
          [](const node::Compose& c) {
            return contains_piecewise(c.outer) || contains_piecewise(c.inner);
          },
          [](const node::Piecewise&) { return true; },
          [](const node::Sum& s) {
            return std::any_of(s.terms.begin(), s.terms.end(), contains_piecewise);
          },
          [](const node::Product& p) {
            return std::any_of(p.factors.begin(), p.factors.end(), contains_piecewise);
          },
          [](const node::Quotient& q) {
            return contains_piecewise(q.numerator) || contains_piecewise(q.denominator);
          },
          [](const node::Inverse& inv) { return contains_piecewise(inv.of); },
          [](const auto&) { return false; },
      },
      e.node().value);
}

namespace {

bool all_equal(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), structurally_equal);
}

}  // namespace

bool structurally_equal(const Expr& lhs, const Expr& rhs) {
  const auto& l = lhs.node().value;
  const auto& r = rhs.node().value;
  if (l.index() != r.index()) return false;
  return std::visit(
      overloaded{
          [](const node::Identity&) { return true; },
          [&](const node::Constant& a) { return a.value == std::get<node::Constant>(r).value; },
          [&](const node::Affine& a) {
            const auto& b = std::get<node::Affine>(r);
            return a.alpha == b.alpha && a.beta == b.beta && structurally_equal(a.inner, b.inner);
          },
          [&](const node::Power& a) { return a.exponent == std::get<node::Power>(r).exponent; },
          [](const node::Exp&) { return true; },
          [](const node::Log&) { return true; },
          [](const node::Reciprocal&) { return true; },
          [&](const node::Moebius& a) {
            const auto& b = std::get<node::Moebius>(r);
            return a.a == b.a && a.b == b.b && a.c == b.c && a.d == b.d &&
                   structurally_equal(a.inner, b.inner);
          },
          [&](const node::Compose& a) {
            const auto& b = std::get<node::Compose>(r);
            return structurally_equal(a.outer, b.outer) && structurally_equal(a.inner, b.inner);
          },
          [&](const node::Piecewise& a) {
            const auto& b = std::get<node::Piecewise>(r);
            return a.breakpoints == b.breakpoints && a.ownership == b.ownership &&
                   all_equal(a.branches, b.branches);
          },
          [&](const node::Sum& a) { return all_equal(a.terms, std::get<node::Sum>(r).terms); },
          [&](const node::Product& a) {
            return all_equal(a.factors, std::get<node::Product>(r).factors);
          },
          [&](const node::Quotient& a) {
            const auto& b = std::get<node::Quotient>(r);
            return structurally_equal(a.numerator, b.numerator) &&
                   structurally_equal(a.denominator, b.denominator);
          },
          [&](const node::Inverse& a) {
            const auto& b = std::get<node::Inverse>(r);
            return a.domain == b.domain && structurally_equal(a.of, b.of);
          },
      },
      l);
}

}  // namespace bmeq
