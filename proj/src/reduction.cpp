#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmeq/equality.hpp"

namespace bmeq {

void MoebiusParams::validate() const {
  const double ad = a * d;
  const double bc = b * c;
  if (!std::isfinite(ad) || !std::isfinite(bc) ||
      !(std::abs(ad - bc) > 1e-12 * std::max({std::abs(ad), std::abs(bc), 1.0}))) {
    fail(ErrorKind::kDomain, "Moebius parameters need ad != bc");
  }
}

double MoebiusParams::relative_error(const MoebiusParams& other) const {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  const double diff = std::max({std::abs(other.a - a), std::abs(other.b - b),
                                std::abs(other.c - c), std::abs(other.d - d)});
  return diff / scale;
}

ReducedSystem reduce(const MeanSpec& left, const MeanSpec& right) {
  if (!(left.domain() == right.domain()) || left.arity() != right.arity()) {
    fail(ErrorKind::kConfig, "means must share the interval and the arity");
  }
  const MonotoneFunction& f = left.generator();
  if (!f.continuous()) {
    fail(ErrorKind::kNotContinuous, "reduction needs a continuous left generator");
  }
  const Interval J = f.range_hull();
  Expr finv = left.inverse().as_expr();

  MonotoneFunction h(ex::compose(right.generator().description(), finv), J);

  std::vector<Expr> P;
  std::vector<Expr> Q;
  for (std::size_t i = 0; i < left.arity(); ++i) {
    P.push_back(ex::compose(left.weights()[i], finv));
    Q.push_back(ex::compose(right.weights()[i], finv));
  }
  WeightFamily Pw(P, J);
  WeightFamily Qw(Q, J);
  Expr r = ex::quotient(ex::sum(Q), ex::sum(P));

  // The expression inverse must agree with the generalized inverse.
  for (double u : J.working_window().sample(64)) {
    const double direct = right.generator().eval(left.inverse().eval(u));
    const double composed = h.eval(u);
    if (std::abs(direct - composed) > 1e-10 * std::max(1.0, std::abs(direct))) {
      std::ostringstream os;
      os.precision(17);
      os << "h = g o f^-1 mismatch at u = " << u << ": " << composed << " vs " << direct;
      fail(ErrorKind::kDomain, os.str());
    }
  }
  return ReducedSystem{J, std::move(h), std::move(Pw), std::move(Qw), std::move(r),
                       std::move(finv)};
}

MeanSpec canonical_transform(const MeanSpec& m, const MoebiusParams& params) {
  params.validate();
  const auto [a, b, c, d] = params;
  const MonotoneFunction& f = m.generator();
  auto scale = [&](double y) { return c == 0 ? d : c * y + d; };
  const Interval& hull = f.range_hull();
  for (double y : {hull.lo(), hull.hi()}) {
    if (!(scale(y) >= 0)) {
      std::ostringstream os;
      os.precision(17);
      os << "c f + d <= 0 towards f = " << y;
      fail(ErrorKind::kSignViolation, os.str());
    }
  }
  for (double x : m.domain().sample(MonotoneFunction::kDefaultSamples)) {
    if (!(scale(f.eval(x)) > 0)) {
      std::ostringstream os;
      os.precision(17);
      os << "c f + d <= 0 at x = " << x;
      fail(ErrorKind::kSignViolation, os.str());
    }
  }
  Expr g = f.map_branches([&](const Expr& branch) { return ex::moebius(a, b, c, d, branch); });
  Expr factor = c == 0 ? ex::constant(d) : ex::affine(c, d, f.description());
  std::vector<Expr> q;
  for (const auto& p : m.weights().weights()) q.push_back(ex::product({factor, p}));
  return MeanSpec(MonotoneFunction(std::move(g), m.domain()),
                  WeightFamily(std::move(q), m.domain()));
}

}  // namespace bmeq
