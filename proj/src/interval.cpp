#include "bmeq/interval.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bmeq/error.hpp"

namespace bmeq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "DomainError";
    case ErrorKind::kRange: return "RangeError";
    case ErrorKind::kNotMonotone: return "NotMonotone";
    case ErrorKind::kNotDifferentiable: return "NotDifferentiable";
    case ErrorKind::kNotContinuous: return "NotContinuous";
    case ErrorKind::kIterationCap: return "IterationCap";
    case ErrorKind::kSubdivisionCap: return "SubdivisionCap";
    case ErrorKind::kDegenerate: return "Degenerate";
    case ErrorKind::kBadIndices: return "BadIndices";
    case ErrorKind::kSignViolation: return "SignViolation";
    case ErrorKind::kFitFailed: return "FitFailed";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kParse: return "ParseError";
  }
  return "Error";
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    fail(ErrorKind::kDomain, "interval needs lo < hi, got (" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + ")");
  }
}

Interval Interval::working_window() const {
  if (finite()) return *this;
  if (std::isfinite(lo_)) return {lo_, lo_ + 10 * std::max(1.0, std::abs(lo_))};
  if (std::isfinite(hi_)) return {hi_ - 10 * std::max(1.0, std::abs(hi_)), hi_};
  return {-10, 10};
}

std::vector<double> Interval::sample(std::size_t count) const {
  std::vector<double> xs;
  xs.reserve(count);
  const double n = static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / n;  // in (0,1)
    double x;
    if (finite()) {
      x = lo_ + s * (hi_ - lo_);
    } else if (std::isfinite(lo_)) {
      // s in (0,1) -> (0, ~100) scale units, denser near the finite end.
      const double t = 0.99 * s;
      x = lo_ + std::max(1.0, std::abs(lo_)) * t / (1 - t);
    } else if (std::isfinite(hi_)) {
      const double t = 0.99 * (1 - s);
      x = hi_ - std::max(1.0, std::abs(hi_)) * t / (1 - t);
    } else {
      x = 100 * std::tan(std::numbers::pi * 0.99 * (s - 0.5)) / std::tan(std::numbers::pi * 0.495);
    }
    x = std::clamp(x, std::nextafter(lo_, kInf), std::nextafter(hi_, -kInf));
    xs.push_back(x);
  }
  return xs;
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "(" << lo_ << ", " << hi_ << ")";
  return os.str();
}

std::vector<double> chebyshev_nodes(const Interval& iv, std::size_t count, double fraction) {
  if (!iv.finite()) fail(ErrorKind::kDomain, "chebyshev_nodes needs a finite interval");
  std::vector<double> xs(count);
  const double mid = std::midpoint(iv.lo(), iv.hi());
  const double half = 0.5 * fraction * iv.length();
  const double n = static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Descending cosines, so ascending nodes.
    const double c = -std::cos(std::numbers::pi * (2 * static_cast<double>(k) + 1) / (2 * n));
    xs[k] = mid + half * c;
  }
  return xs;
}

}  // namespace bmeq
