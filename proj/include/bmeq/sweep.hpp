#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>

namespace bmeq {

enum class Exec { kSerial, kParallel };

/// Largest residual over an index range and the first index attaining it.
struct SweepMax {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  double value = 0;
  std::size_t index = kNone;
};

namespace detail {

inline double sanitize(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

// Larger value wins; ties go to the lower index, so merge order is irrelevant.
inline void absorb(SweepMax& into, double value, std::size_t index) {
  if (into.index == SweepMax::kNone || value > into.value ||
      (value == into.value && index < into.index)) {
    into.value = value;
    into.index = index;
  }
}

}  // namespace detail

/// Serial reference: max over k in [0, count) of residual(k). NaN counts as
/// +inf. Exceptions propagate from the first failing index.
template <class Residual>
SweepMax sweep_max_serial(std::size_t count, Residual&& residual) {
  SweepMax best;
  for (std::size_t k = 0; k < count; ++k) detail::absorb(best, detail::sanitize(residual(k)), k);
  return best;
}

/// OpenMP version of sweep_max_serial with bit-identical results. The
/// exception from the lowest failing index is rethrown after the region.
template <class Residual>
SweepMax sweep_max_parallel(std::size_t count, Residual&& residual) {
  SweepMax best;
  std::exception_ptr error;
  std::size_t error_index = SweepMax::kNone;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel
  {
    SweepMax local;
    std::exception_ptr local_error;
    std::size_t local_error_index = SweepMax::kNone;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      if (local_error) continue;
      const auto idx = static_cast<std::size_t>(k);
      try {
        detail::absorb(local, detail::sanitize(residual(idx)), idx);
      } catch (...) {
        local_error = std::current_exception();
        local_error_index = idx;
      }
    }
#pragma omp critical(bmeq_sweep_merge)
    {
      if (local.index != SweepMax::kNone) detail::absorb(best, local.value, local.index);
      if (local_error && local_error_index < error_index) {
        error = local_error;
        error_index = local_error_index;
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return best;
}

template <class Residual>
SweepMax sweep_max(std::size_t count, Residual&& residual, Exec exec) {
  return exec == Exec::kParallel ? sweep_max_parallel(count, residual)
                                 : sweep_max_serial(count, residual);
}

}  // namespace bmeq
