#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bmeq/expr.hpp"
#include "bmeq/interval.hpp"
#include "bmeq/monotone_fn.hpp"

namespace bmeq {

/// n >= 2 strictly positive weight functions on a shared interval.
class WeightFamily {
 public:
  WeightFamily(std::vector<Expr> weights, Interval domain,
               std::size_t samples = MonotoneFunction::kDefaultSamples);

  std::size_t size() const noexcept { return weights_.size(); }
  const Interval& domain() const noexcept { return domain_; }
  std::span<const Expr> weights() const noexcept { return weights_; }
  const Expr& operator[](std::size_t i) const { return weights_.at(i); }

  /// p_i(x), revalidating positivity at the evaluation point.
  double eval(std::size_t i, double x) const;
  /// p_0 = p_1 + ... + p_n as an expression.
  Expr total() const;

 private:
  std::vector<Expr> weights_;
  Interval domain_;
};

/// The mean A_{f,p}: a generator, its weights and the cached left inverse.
class MeanSpec {
 public:
  MeanSpec(MonotoneFunction generator, WeightFamily weights);

  const MonotoneFunction& generator() const noexcept { return generator_; }
  const WeightFamily& weights() const noexcept { return weights_; }
  const GeneralizedInverse& inverse() const noexcept { return inverse_; }
  const Interval& domain() const noexcept { return generator_.domain(); }
  std::size_t arity() const noexcept { return weights_.size(); }

 private:
  MonotoneFunction generator_;
  WeightFamily weights_;
  GeneralizedInverse inverse_;
};

MeanSpec make_mean(Expr generator, std::vector<Expr> weights, const Interval& domain);

/// R_{f,p}(x) = sum p_i(x_i) f(x_i) / sum p_i(x_i).
double weighted_generator_average(const MeanSpec& m, std::span<const double> x);

/// f^(-1)(R_{f,p}(x)).
double mean_direct(const MeanSpec& m, std::span<const double> x);

/// Bisection on the sign of S(z) = sum p_i(x_i)(f(z) - f(x_i)) over
/// [min x, max x]; the sign is flipped for decreasing generators.
double mean_by_sign_characterization(const MeanSpec& m, std::span<const double> x,
                                     double tol = 1e-12);

/// Unique root of sum p_i(x_i)(f(y) - f(x_i)) = 0. Continuous generators only
/// (NotContinuous otherwise).
double mean_by_root(const MeanSpec& m, std::span<const double> x, double tol = 1e-12);

/// Central difference of A along coordinate i at (t, ..., t).
double diagonal_partial(const MeanSpec& m, std::size_t i, double t, double h);

/// Richardson-extrapolated diagonal partial over steps h, h/2, ...
double diagonal_partial_extrapolated(const MeanSpec& m, std::size_t i, double t, double h,
                                     int levels = 3);

/// The k-variable mean (f, (p_{i_1}, ..., p_{i_k})); indices 0-based,
/// strictly increasing, k >= 2.
MeanSpec restrict(const MeanSpec& m, std::span<const std::size_t> indices);

/// The same mean with generator and weights restricted to `sub`.
MeanSpec restrict_domain(const MeanSpec& m, const Interval& sub);

}  // namespace bmeq
