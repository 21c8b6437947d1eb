#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bmeq/error.hpp"
#include "bmeq/expr.hpp"

using namespace bmeq;

TEST(Expr, LeafValues) {
  EXPECT_EQ(ex::identity().eval(3.5), 3.5);
  EXPECT_EQ(ex::constant(2).eval(-7), 2);
  EXPECT_DOUBLE_EQ(ex::log().eval(std::numbers::e), 1);
  EXPECT_DOUBLE_EQ(ex::exp().eval(0), 1);
  EXPECT_DOUBLE_EQ(ex::reciprocal().eval(4), 0.25);
  EXPECT_DOUBLE_EQ(ex::power(0.5).eval(9), 3);
  EXPECT_DOUBLE_EQ(ex::power(3).eval(-2), -8);
}

TEST(Expr, UndefinedPointsThrow) {
  EXPECT_THROW(ex::log().eval(0), Error);
  EXPECT_THROW(ex::log().eval(-1), Error);
  EXPECT_THROW(ex::reciprocal().eval(0), Error);
  EXPECT_THROW(ex::power(0.5).eval(-1), Error);
  EXPECT_THROW(ex::power(-1).eval(0), Error);
  EXPECT_NO_THROW(ex::power(2).eval(0));
  EXPECT_THROW(ex::moebius(1, 0, 1, -1).eval(1), Error);
}

TEST(Expr, FactoriesValidate) {
  EXPECT_THROW(ex::affine(0, 1), Error);
  EXPECT_THROW(ex::moebius(1, 2, 2, 4), Error);
  EXPECT_THROW(ex::piecewise({1, 0}, {ex::identity(), ex::identity(), ex::identity()}), Error);
  EXPECT_THROW(ex::piecewise({0}, {ex::identity()}), Error);
}

TEST(Expr, CompositeValues) {
  const Expr m = ex::moebius(2, -1, 0.5, 3, ex::log());
  const double x = 2.5;
  const double u = std::log(x);
  EXPECT_DOUBLE_EQ(m.eval(x), (2 * u - 1) / (0.5 * u + 3));
  EXPECT_DOUBLE_EQ(ex::compose(ex::exp(), ex::affine(2, 1)).eval(0.5), std::exp(2.0));
  EXPECT_DOUBLE_EQ(ex::sum({ex::identity(), ex::constant(1)}).eval(2), 3);
  EXPECT_DOUBLE_EQ(ex::product({ex::identity(), ex::identity()}).eval(3), 9);
  EXPECT_DOUBLE_EQ(ex::quotient(ex::constant(1), ex::identity()).eval(4), 0.25);
}

TEST(Expr, PiecewiseOwnership) {
  const Expr right = ex::piecewise({0}, {ex::identity(), ex::affine(1, 1)});
  const Expr left = ex::piecewise({0}, {ex::identity(), ex::affine(1, 1)}, {Owner::kLeft});
  EXPECT_EQ(right.eval(0), 1);
  EXPECT_EQ(left.eval(0), 0);
  EXPECT_EQ(right.eval(-0.5), -0.5);
  EXPECT_EQ(right.eval(0.5), 1.5);
}

// Independent oracle: a symmetric difference with a tiny step.
double numeric_slope(const Expr& e, double x) {
  const double h = 1e-6 * (1 + std::abs(x));
  return (e.eval(x + h) - e.eval(x - h)) / (2 * h);
}

TEST(Expr, DerivativesMatchDifferenceQuotients) {
  const std::vector<std::pair<Expr, double>> cases{
      {ex::log(), 1.7},
      {ex::exp(), -0.3},
      {ex::power(2.5), 1.2},
      {ex::reciprocal(), 0.8},
      {ex::affine(-3, 2, ex::log()), 2.0},
      {ex::moebius(1, 2, -0.25, 2, ex::log()), 1.5},
      {ex::compose(ex::exp(), ex::power(2)), 0.7},
      {ex::sum({ex::log(), ex::identity()}), 3.0},
      {ex::product({ex::exp(), ex::identity()}), 0.4},
      {ex::quotient(ex::identity(), ex::affine(1, 1)), 0.9},
  };
  for (const auto& [e, x] : cases) {
    EXPECT_NEAR(e.derivative(x), numeric_slope(e, x), 1e-7 * (1 + std::abs(e.derivative(x))))
        << e.kind_name() << " at " << x;
  }
}

TEST(Expr, ClosedFormInverseRoundTrips) {
  const std::vector<std::pair<Expr, double>> cases{
      {ex::identity(), 0.3},
      {ex::affine(2, -1, ex::log()), 2.0},
      {ex::power(3), 1.4},
      {ex::exp(), 0.2},
      {ex::log(), 5},
      {ex::reciprocal(), 0.25},
      {ex::moebius(2, -1, 0.5, 3), 0.7},
      {ex::compose(ex::log(), ex::affine(3, 1)), 0.6},
  };
  for (const auto& [e, x] : cases) {
    const auto inv = closed_form_inverse(e);
    ASSERT_TRUE(inv.has_value()) << e.kind_name();
    EXPECT_NEAR(inv->eval(e.eval(x)), x, 1e-14 * (1 + std::abs(x))) << e.kind_name();
  }
  EXPECT_FALSE(closed_form_inverse(ex::sum({ex::identity(), ex::exp()})).has_value());
}

TEST(Expr, NumericInverse) {
  const Expr f = ex::sum({ex::identity(), ex::exp()});
  const Expr inv = ex::numeric_inverse(f, Interval(-kInf, kInf));
  for (double x : {-3.0, 0.0, 0.5, 2.0}) EXPECT_NEAR(inv.eval(f.eval(x)), x, 1e-13);
}

TEST(Expr, OneSidedLimits) {
  EXPECT_EQ(one_sided_limit(ex::log(), 0, +1), -kInf);
  EXPECT_EQ(one_sided_limit(ex::reciprocal(), 0, +1), kInf);
  EXPECT_EQ(one_sided_limit(ex::reciprocal(), 0, -1), -kInf);
  EXPECT_EQ(one_sided_limit(ex::exp(), -kInf, +1), 0);
  const Expr jump = ex::piecewise({0}, {ex::identity(), ex::affine(1, 1)});
  EXPECT_EQ(one_sided_limit(jump, 0, -1), 0);
  EXPECT_EQ(one_sided_limit(jump, 0, +1), 1);
}

TEST(Expr, StructuralEquality) {
  EXPECT_TRUE(structurally_equal(ex::moebius(1, 2, 3, 4, ex::log()), ex::moebius(1, 2, 3, 4, ex::log())));
  EXPECT_FALSE(structurally_equal(ex::log(), ex::exp()));
  EXPECT_TRUE(contains_piecewise(ex::compose(ex::exp(), ex::piecewise({0}, {ex::identity(), ex::affine(1, 1)}))));
  EXPECT_FALSE(contains_piecewise(ex::log()));
}
