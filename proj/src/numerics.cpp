#include "bmeq/numerics.hpp"

namespace bmeq::numerics {

AffineFit affine_lsq(std::span<const Point> points) {
  if (points.size() < 2) fail(ErrorKind::kDegenerate, "affine_lsq needs at least two points");
  const double n = static_cast<double>(points.size());
  double mean_u = 0;
  double mean_v = 0;
  for (const auto& p : points) {
    mean_u += p.u;
    mean_v += p.v;
  }
  mean_u /= n;
  mean_v /= n;
  // Centered sums keep the normal equations well conditioned far from 0.
  double suu = 0;
  double suv = 0;
  for (const auto& p : points) {
    suu += (p.u - mean_u) * (p.u - mean_u);
    suv += (p.u - mean_u) * (p.v - mean_v);
  }
  if (suu == 0) fail(ErrorKind::kDegenerate, "affine_lsq: all abscissae are equal");
  AffineFit fit;
  fit.slope = suv / suu;
  fit.intercept = mean_v - fit.slope * mean_u;
  double max_res = 0;
  double max_v = 0;
  for (const auto& p : points) {
    max_res = std::max(max_res, std::abs(p.v - fit.value(p.u)));
    max_v = std::max(max_v, std::abs(p.v));
  }
  fit.max_rel_residual = max_v > 0 ? max_res / max_v : max_res;
  return fit;
}

}  // namespace bmeq::numerics
