#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bmeq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi) over the extended reals.
class Interval {
 public:
  Interval(double lo, double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  bool contains(double x) const noexcept { return lo_ < x && x < hi_; }
  bool contains_closed(double x) const noexcept { return lo_ <= x && x <= hi_; }
  bool finite() const noexcept { return std::isfinite(lo_) && std::isfinite(hi_); }
  double length() const noexcept { return hi_ - lo_; }

  /// Finite sub-interval used for grids. Infinite ends are replaced by
  /// finite_end +/- 10*max(1,|finite_end|); (-inf,inf) becomes (-10,10).
  Interval working_window() const;

  /// `count` interior points, mapped so that infinite ends are reachable
  /// without overflow (at most ~100 scale units past a finite end).
  std::vector<double> sample(std::size_t count) const;

  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

/// Chebyshev nodes of the first kind over the centered `fraction` of `iv`
/// (which must be finite), ascending.
std::vector<double> chebyshev_nodes(const Interval& iv, std::size_t count,
                                    double fraction = 0.9);

}  // namespace bmeq
