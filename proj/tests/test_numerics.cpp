#include <gtest/gtest.h>

#include <cmath>

#include "bmeq/numerics.hpp"

using namespace bmeq;
using namespace bmeq::numerics;

namespace {
int sign_of(double v) { return (v > 0) - (v < 0); }
}  // namespace

TEST(Bisect, FindsSignChange) {
  const double tol = 1e-12;
  EXPECT_NEAR(bisect([](double z) { return sign_of(z - 0.5); }, 0, 1, {tol}), 0.5, tol);
  EXPECT_NEAR(bisect([](double z) { return sign_of(z * z * z - 2); }, 1, 2, {tol}), std::cbrt(2.0), tol);
  EXPECT_EQ(bisect([](double) { return 1; }, 0, 1), 0);
  EXPECT_EQ(bisect([](double) { return -1; }, 0, 1), 1);
}

TEST(Bisect, BracketInvariant) {
  const double tol = 1e-10;
  for (double root : {0.1, 0.333, 0.77}) {
    auto s = [root](double z) { return sign_of(std::exp(z) - std::exp(root)); };
    const double z = bisect(s, 0, 1, {tol});
    EXPECT_LE(s(z - tol), 0);
    EXPECT_GE(s(z + tol), 0);
  }
}

TEST(Bisect, IterationCap) {
  EXPECT_THROW(bisect([](double z) { return z < 0.5 ? -1 : 1; }, 0, 1, {1e-300, 20}), Error);
}

TEST(Differences, CentralAndRichardson) {
  EXPECT_DOUBLE_EQ(central_diff([](double u) { return u * u; }, 1, 0.125), 2);
  EXPECT_NEAR(richardson([](double u) { return std::exp(u); }, 0, 1e-2, 3), 1, 1e-10);
  EXPECT_EQ(central_diff([](double u) { return std::abs(u); }, 0, 0.1), 0);
}

TEST(Differences, RichardsonImprovesWithLevels) {
  auto check = [](auto fn, double x, double exact) {
    double prev = 1;
    for (int levels = 1; levels <= 3; ++levels) {
      const double err = std::abs(richardson(fn, x, 0.1, levels) - exact);
      EXPECT_LE(err, prev);
      prev = err;
    }
  };
  check([](double u) { return std::exp(u); }, 0.3, std::exp(0.3));
  check([](double u) { return std::sin(u); }, 0.3, std::cos(0.3));
  check([](double u) { return (2 * u + 1) / (u + 3); }, 0.3, 5 / ((0.3 + 3) * (0.3 + 3)));
}

TEST(Simpson, KnownIntegrals) {
  EXPECT_NEAR(simpson_adaptive([](double) { return 1.0; }, 0, 1), 1, 1e-14);
  EXPECT_NEAR(simpson_adaptive([](double u) { return 1 / (u * u); }, 1, 2), 0.5, 1e-12);
  EXPECT_NEAR(simpson_adaptive([](double u) { return 1 / ((2 * u + 1) * (2 * u + 1)); }, 1, 2),
              1.0 / 15, 1e-12);
  EXPECT_NEAR(simpson_adaptive([](double u) { return 1 / (u * u); }, 2, 1), -0.5, 1e-12);
}

TEST(Simpson, CubicsAreExact) {
  auto cubic = [](double u) { return 4 * u * u * u - 3 * u * u + u - 7; };
  // Antiderivative u^4 - u^3 + u^2/2 - 7u.
  auto F = [](double u) { return u * u * u * u - u * u * u + u * u / 2 - 7 * u; };
  EXPECT_NEAR(simpson_adaptive(cubic, -1.5, 2.5), F(2.5) - F(-1.5), 1e-12);
}

TEST(Simpson, CapIsReported) {
  EXPECT_THROW(simpson_adaptive([](double u) { return std::sin(1 / u); }, 1e-9, 1, 1e-15, 5), Error);
}

TEST(AffineLsq, Examples) {
  const std::vector<Point> line{{0, -2}, {1, 1}, {2, 4}, {3, 7}};
  auto fit = affine_lsq(line);
  EXPECT_NEAR(fit.slope, 3, 1e-14);
  EXPECT_NEAR(fit.intercept, -2, 1e-14);
  EXPECT_LE(fit.max_rel_residual, 1e-13);

  // Normal equations for u^2 at 1, 1.5, 2: slope 3, intercept -25/12.
  const std::vector<Point> parabola{{1, 1}, {1.5, 2.25}, {2, 4}};
  fit = affine_lsq(parabola);
  EXPECT_NEAR(fit.slope, 3, 1e-14);
  EXPECT_NEAR(fit.intercept, -25.0 / 12, 1e-14);
  EXPECT_GT(fit.max_rel_residual, 1e-3);

  const std::vector<Point> flat{{0, 1}, {1, 1}};
  fit = affine_lsq(flat);
  EXPECT_EQ(fit.slope, 0);
  EXPECT_EQ(fit.intercept, 1);
}

TEST(AffineLsq, Degenerate) {
  const std::vector<Point> same{{1, 0}, {1, 2}};
  EXPECT_THROW(affine_lsq(same), Error);
  EXPECT_THROW(affine_lsq(std::vector<Point>{{1, 0}}), Error);
}
