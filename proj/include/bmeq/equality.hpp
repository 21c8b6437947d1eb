#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmeq/error.hpp"
#include "bmeq/means.hpp"
#include "bmeq/sweep.hpp"

namespace bmeq {

/// Coefficients of u -> (a u + b)/(c u + d) with ad != bc.
struct MoebiusParams {
  double a = 1;
  double b = 0;
  double c = 0;
  double d = 1;

  double determinant() const noexcept { return a * d - b * c; }
  /// Throws DomainError unless |ad-bc| > 1e-12 max(|ad|,|bc|,1).
  void validate() const;
  /// max_k |other_k - this_k| / max_k |this_k|.
  double relative_error(const MoebiusParams& other) const;
};

/// The substitution J = f(I), h = g∘f^-1, P = p∘f^-1, Q = q∘f^-1, r = Q0/P0.
struct ReducedSystem {
  Interval J;
  MonotoneFunction h;
  WeightFamily P;
  WeightFamily Q;
  Expr r;
  Expr f_inverse;
};

struct DiagnosticResult {
  std::string name;
  double max_residual = 0;
  double threshold = 0;
  bool pass = true;
  std::vector<double> witness;
  std::map<std::string, double> values;
};

DiagnosticResult make_diagnostic(std::string name, double max_residual, double threshold,
                                 std::vector<double> witness = {});

struct Thresholds {
  double equality = 1e-9;
  double first_order = 1e-9;
  double derivative = 1e-7;
  double affine_fit = 1e-9;
  double fit_validation = 1e-8;
  double gamma_consistency = 1e-6;
  /// Relative margin below which two weights count as equal.
  double distinct_margin = 1e-8;
};

enum class Verdict { kEqual, kNotEqual, kInconclusive };
enum class Route { kMain, kMainPlus, kAuto };

std::string_view to_string(Verdict v);
std::string_view to_string(Route r);

struct DecideConfig {
  Route route = Route::kAuto;
  /// Index pair (i != j) with p_i != p_j on the sub-interval.
  std::optional<std::array<std::size_t, 2>> pair;
  /// Index triple i < j < k for the summed-weight route.
  std::optional<std::array<std::size_t, 3>> triple;
  /// I0; defaults to the working window of I.
  std::optional<Interval> subinterval;
  /// Tuple arity for verification; 0 means the arity of the means.
  std::size_t n = 0;
  std::size_t grid = 16;
  /// Perturbation radius as a fraction of the working window length.
  double radius_fraction = 0.05;
  std::size_t random_points = 64;
  std::uint64_t seed = 42;
  Thresholds thresholds;
  Exec exec = Exec::kParallel;
  bool extended_diagnostics = false;
};

struct EqualityReport {
  Verdict verdict = Verdict::kInconclusive;
  std::optional<MoebiusParams> fitted;
  std::vector<DiagnosticResult> diagnostics;
  Interval interval{0, 1};
  std::size_t n = 0;
  std::size_t grid = 0;
  double radius = 0;
  Route route = Route::kAuto;
  std::vector<std::size_t> indices;
  std::optional<Interval> subinterval;
  std::vector<double> witness;
};

/// Near-diagonal tuples: Chebyshev base points over the centered 90% of a
/// finite window, each offset by all 2^n sign patterns of +-radius plus the
/// 2n single-coordinate offsets. Coordinates are clamped into the window.
class NearDiagonalGrid {
 public:
  NearDiagonalGrid(const Interval& window, std::size_t n, std::size_t grid, double radius);

  std::size_t size() const noexcept { return bases_.size() * patterns_per_base(); }
  std::size_t arity() const noexcept { return n_; }
  void tuple(std::size_t k, std::span<double> out) const;
  std::vector<double> tuple(std::size_t k) const;

 private:
  std::size_t patterns_per_base() const noexcept { return (std::size_t{1} << n_) + 2 * n_; }

  Interval window_;
  std::size_t n_;
  std::vector<double> bases_;
  double radius_;
};

ReducedSystem reduce(const MeanSpec& left, const MeanSpec& right);

/// (g, q) = ((a f + b)/(c f + d), (c f + d) p). Throws SignViolation when
/// c f + d <= 0 somewhere on I.
MeanSpec canonical_transform(const MeanSpec& m, const MoebiusParams& params);

DiagnosticResult verify_equality_grid(const MeanSpec& left, const MeanSpec& right, std::size_t n,
                                      std::size_t grid, double radius, double tol,
                                      Exec exec = Exec::kParallel);

/// Seeded random near-diagonal tuples (base uniform over the centered 90% of
/// the window, each coordinate within +-radius).
DiagnosticResult verify_equality_random(const MeanSpec& left, const MeanSpec& right,
                                        std::size_t count, double radius, double tol,
                                        std::uint64_t seed, Exec exec = Exec::kParallel);

DiagnosticResult first_order_condition(const ReducedSystem& rs, std::size_t grid,
                                       double threshold = 1e-9, Exec exec = Exec::kParallel);

DiagnosticResult eq3_residual(const ReducedSystem& rs, std::size_t n, std::size_t grid,
                              double radius, double threshold = 1e-9,
                              Exec exec = Exec::kParallel);

DiagnosticResult residual_ij(const ReducedSystem& rs, std::size_t i, std::size_t j,
                             std::size_t grid, double radius, double threshold = 1e-7,
                             Exec exec = Exec::kParallel);

/// Integral form (with int_v^u 1/r^2 by adaptive Simpson); pairs with u == v
/// are skipped.
DiagnosticResult residual_ij_plus(const ReducedSystem& rs, std::size_t i, std::size_t j,
                                  std::size_t grid, double radius, double threshold = 1e-7,
                                  Exec exec = Exec::kParallel);

/// gamma(u) = h'(u) r(u)^2; residual (max - min)/max|gamma|; values["gamma"]
/// is the grid median.
DiagnosticResult hprime_r2_constancy(const ReducedSystem& rs, std::size_t grid,
                                     double threshold = 1e-7);

double symmetric_derivative_rprime(const ReducedSystem& rs, double w, double t);

struct AffinityResult {
  DiagnosticResult symmetric_derivative;
  DiagnosticResult affine_fit;
  double c = 0;
  double d = 0;
  bool pass() const noexcept { return symmetric_derivative.pass && affine_fit.pass; }
};

AffinityResult affinity_of_r(const ReducedSystem& rs, std::size_t grid,
                             double derivative_threshold = 1e-7, double fit_threshold = 1e-9);

struct MoebiusFit {
  MoebiusParams params;
  AffinityResult affinity;
  DiagnosticResult hr_fit;
  DiagnosticResult validation;
};

/// Raised by fit_moebius; carries the partial fit and its diagnostics.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& message, MoebiusFit fit)
      : Error(ErrorKind::kFitFailed, message), fit_(std::move(fit)) {}
  const MoebiusFit& fit() const noexcept { return fit_; }

 private:
  MoebiusFit fit_;
};

/// max over the working window of I of |g - (af+b)/(cf+d)|/max(1,|g|) and
/// |q_i - (cf+d) p_i|/q_i; infinite if cf+d <= 0 at a grid point.
DiagnosticResult validate_params(const MeanSpec& left, const MeanSpec& right,
                                 const MoebiusParams& params, std::size_t grid,
                                 double threshold = 1e-8);

/// (c,d) from the affine fit of r, (a,b) from the affine fit of h*r, then
/// validation on the whole interval of the inputs. Throws FitFailure.
MoebiusFit fit_moebius(const MeanSpec& left, const MeanSpec& right, std::size_t grid,
                       const Thresholds& thresholds = {});
MoebiusFit fit_moebius(const MeanSpec& left, const MeanSpec& right, const ReducedSystem& rs,
                       std::size_t grid, const Thresholds& thresholds = {});

/// Full decision pipeline. Throws ConfigError when the chosen route's
/// hypotheses are not declared.
EqualityReport decide_equality(const MeanSpec& left, const MeanSpec& right,
                               const DecideConfig& config);

/// Every diagnostic without a verdict (used by the `diagnose` command).
std::vector<DiagnosticResult> run_diagnostics(const MeanSpec& left, const MeanSpec& right,
                                              const DecideConfig& config);

}  // namespace bmeq
