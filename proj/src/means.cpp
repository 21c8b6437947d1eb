#include "bmeq/means.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmeq/error.hpp"
#include "bmeq/numerics.hpp"

namespace bmeq {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_tuple(const MeanSpec& m, std::span<const double> x) {
  if (x.size() != m.arity()) {
    fail(ErrorKind::kDomain, "tuple has " + std::to_string(x.size()) + " coordinates, mean has " +
                                 std::to_string(m.arity()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!m.domain().contains(x[i])) {
      fail(ErrorKind::kDomain, "coordinate " + std::to_string(i) + " = " + fmt(x[i]) +
                                   " outside " + m.domain().to_string());
    }
  }
}

}  // namespace

WeightFamily::WeightFamily(std::vector<Expr> weights, Interval domain, std::size_t samples)
    : weights_(std::move(weights)), domain_(domain) {
  if (weights_.size() < 2) fail(ErrorKind::kDomain, "a weight family needs n >= 2 weights");
  const auto xs = domain_.sample(samples);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    for (double x : xs) (void)eval(i, x);
  }
}

double WeightFamily::eval(std::size_t i, double x) const {
  const double v = weights_.at(i).eval(x);
  if (!(v > 0)) {
    fail(ErrorKind::kDomain, "weight " + std::to_string(i) + " is not positive at x = " + fmt(x));
  }
  return v;
}

Expr WeightFamily::total() const { return ex::sum(weights_); }

MeanSpec::MeanSpec(MonotoneFunction generator, WeightFamily weights)
    : generator_(std::move(generator)),
      weights_(std::move(weights)),
      inverse_(generator_) {
  if (!(generator_.domain() == weights_.domain())) {
    fail(ErrorKind::kDomain, "generator and weights must share the interval");
  }
}

MeanSpec make_mean(Expr generator, std::vector<Expr> weights, const Interval& domain) {
  return MeanSpec(MonotoneFunction(std::move(generator), domain),
                  WeightFamily(std::move(weights), domain));
}

double weighted_generator_average(const MeanSpec& m, std::span<const double> x) {
  check_tuple(m, x);
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = m.weights().eval(i, x[i]);
    num += p * m.generator().eval(x[i]);
    den += p;
  }
  return num / den;
}

double mean_direct(const MeanSpec& m, std::span<const double> x) {
  const double r = weighted_generator_average(m, x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  // R lies in conv(f(x)); rounding may push it a hair outside.
  const Interval& hull = m.inverse().range_hull();
  const double y = std::clamp(r, hull.lo(), hull.hi());
  return std::clamp(m.inverse().eval(y), *lo, *hi);
}

double mean_by_sign_characterization(const MeanSpec& m, std::span<const double> x, double tol) {
  check_tuple(m, x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return *lo;
  std::vector<double> p(x.size());
  std::vector<double> fx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = m.weights().eval(i, x[i]);
    fx[i] = m.generator().eval(x[i]);
  }
  const double orientation = m.generator().increasing() ? 1.0 : -1.0;
  auto sign = [&](double z) {
    const double fz = m.generator().eval(z);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * (fz - fx[i]);
    s *= orientation;
    return (s > 0) - (s < 0);
  };
  return numerics::bisect(sign, *lo, *hi, {tol, 200});
}

double mean_by_root(const MeanSpec& m, std::span<const double> x, double tol) {
  if (!m.generator().continuous()) {
    fail(ErrorKind::kNotContinuous, "generator has a jump; use the sign characterization");
  }
  check_tuple(m, x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return *lo;
  double total_p = 0;
  double total_pf = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = m.weights().eval(i, x[i]);
    total_p += p;
    total_pf += p * m.generator().eval(x[i]);
  }
  // F(y) = P f(y) - sum p_i f(x_i); orient by its values at the bracket ends.
  auto value = [&](double y) { return total_p * m.generator().eval(y) - total_pf; };
  const double f_lo = value(*lo);
  const double f_hi = value(*hi);
  if (f_lo == 0) return *lo;
  if (f_hi == 0) return *hi;
  const double orientation = f_hi > f_lo ? 1.0 : -1.0;
  auto sign = [&](double y) {
    const double v = orientation * value(y);
    return (v > 0) - (v < 0);
  };
  return numerics::bisect(sign, *lo, *hi, {tol, 200});
}

double diagonal_partial(const MeanSpec& m, std::size_t i, double t, double h) {
  if (i >= m.arity()) fail(ErrorKind::kDomain, "coordinate index out of range");
  if (!(h > 0) || !m.domain().contains(t - h) || !m.domain().contains(t + h)) {
    fail(ErrorKind::kDomain, "t +- h must stay inside " + m.domain().to_string());
  }
  std::vector<double> x(m.arity(), t);
  auto along = [&](double s) {
    x[i] = s;
    return mean_direct(m, x);
  };
  return numerics::central_diff(along, t, h);
}

double diagonal_partial_extrapolated(const MeanSpec& m, std::size_t i, double t, double h,
                                     int levels) {
  return numerics::richardson_extrapolate(
      [&](double step) { return diagonal_partial(m, i, t, step); }, h, levels);
}

MeanSpec restrict(const MeanSpec& m, std::span<const std::size_t> indices) {
  if (indices.size() < 2) fail(ErrorKind::kBadIndices, "need at least two indices");
  std::vector<Expr> weights;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= m.arity() || (k > 0 && indices[k] <= indices[k - 1])) {
      fail(ErrorKind::kBadIndices, "indices must be strictly increasing and below " +
                                       std::to_string(m.arity()));
    }
    weights.push_back(m.weights()[indices[k]]);
  }
  return MeanSpec(m.generator(), WeightFamily(std::move(weights), m.domain()));
}

MeanSpec restrict_domain(const MeanSpec& m, const Interval& sub) {
  std::vector<Expr> weights(m.weights().weights().begin(), m.weights().weights().end());
  return MeanSpec(m.generator().restricted(sub), WeightFamily(std::move(weights), sub));
}

}  // namespace bmeq
