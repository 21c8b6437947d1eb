// Serial reference vs OpenMP sweeps on the same near-diagonal grids.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "bmeq/equality.hpp"

using namespace bmeq;

namespace {

template <class Fn>
double seconds(Fn&& fn, int reps) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  return dt.count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t grid = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  const Interval I(0.5, 4.0);
  const MeanSpec left = make_mean(ex::log(), {ex::constant(1), ex::identity(), ex::power(2)}, I);
  const MeanSpec right = canonical_transform(left, {2, -1, 0.5, 3});
  const double radius = 0.05 * I.length();

  std::printf("threads=%d grid=%zu reps=%d\n", omp_get_max_threads(), grid, reps);
  std::printf("%-22s %12s %12s %8s %s\n", "kernel", "serial[s]", "parallel[s]", "speedup",
              "identical");

  auto row = [&](const char* name, auto&& kernel) {
    DiagnosticResult s;
    DiagnosticResult p;
    const double ts = seconds([&] { s = kernel(Exec::kSerial); }, reps);
    const double tp = seconds([&] { p = kernel(Exec::kParallel); }, reps);
    const bool same = s.max_residual == p.max_residual && s.witness == p.witness;
    std::printf("%-22s %12.6f %12.6f %8.2f %s\n", name, ts, tp, ts / tp, same ? "yes" : "NO");
  };

  row("equality_grid", [&](Exec e) {
    return verify_equality_grid(left, right, 3, grid, radius, 1e-9, e);
  });
  row("equality_random", [&](Exec e) {
    return verify_equality_random(left, right, 64 * grid, radius, 1e-9, 42, e);
  });
  const ReducedSystem rs = reduce(left, right);
  const double jr = 0.05 * rs.J.working_window().length();
  row("first_order", [&](Exec e) { return first_order_condition(rs, 16 * grid, 1e-9, e); });
  row("eq3_residual", [&](Exec e) { return eq3_residual(rs, 3, grid, jr, 1e-9, e); });
  row("residual_ij", [&](Exec e) { return residual_ij(rs, 0, 1, 4 * grid, jr, 1e-7, e); });
  return 0;
}
