#include <gtest/gtest.h>

#include <cmath>

#include "bmeq/error.hpp"
#include "bmeq/interval.hpp"

using namespace bmeq;

TEST(Interval, RejectsEmptyOrNan) {
  EXPECT_THROW(Interval(1, 1), Error);
  EXPECT_THROW(Interval(2, 1), Error);
  EXPECT_THROW(Interval(std::nan(""), 1), Error);
}

TEST(Interval, MembershipIsOpen) {
  const Interval iv(0, 1);
  EXPECT_FALSE(iv.contains(0));
  EXPECT_FALSE(iv.contains(1));
  EXPECT_TRUE(iv.contains(std::nextafter(0.0, 1.0)));
  EXPECT_TRUE(iv.contains_closed(1));
}

TEST(Interval, WorkingWindow) {
  EXPECT_EQ(Interval(0, kInf).working_window(), Interval(0, 10));
  EXPECT_EQ(Interval(-kInf, -3).working_window(), Interval(-33, -3));
  EXPECT_EQ(Interval(-kInf, kInf).working_window(), Interval(-10, 10));
  EXPECT_EQ(Interval(1, 2).working_window(), Interval(1, 2));
}

TEST(Interval, SamplesStayInsideEveryShape) {
  for (const Interval iv : {Interval(0, 1), Interval(0, kInf), Interval(-kInf, 5), Interval(-kInf, kInf)}) {
    const auto xs = iv.sample(257);
    ASSERT_EQ(xs.size(), 257U);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      EXPECT_TRUE(iv.contains(xs[k])) << iv.to_string() << " " << xs[k];
      if (k) EXPECT_LT(xs[k - 1], xs[k]);
    }
  }
}

TEST(Interval, ChebyshevNodesCoverCentralPart) {
  const auto xs = chebyshev_nodes(Interval(0, 10), 16);
  ASSERT_EQ(xs.size(), 16U);
  EXPECT_GT(xs.front(), 0.5);
  EXPECT_LT(xs.back(), 9.5);
  for (std::size_t k = 1; k < xs.size(); ++k) EXPECT_LT(xs[k - 1], xs[k]);
  // Nodes are symmetric about the midpoint.
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_NEAR(xs[k] + xs[15 - k], 10, 1e-12);
  EXPECT_THROW(chebyshev_nodes(Interval(0, kInf), 4), Error);
}
