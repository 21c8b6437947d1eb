#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bmeq/expr.hpp"
#include "bmeq/interval.hpp"

namespace bmeq {

enum class Direction { kIncreasing, kDecreasing };

/// One branch of a MonotoneFunction on (lo, hi). Interior breakpoints are
/// owned by exactly one adjacent piece.
struct Piece {
  double lo;
  double hi;
  Expr branch;
  bool owns_lo;
  bool owns_hi;
};

/// Interior breakpoint with its one-sided limits and owner value.
struct Breakpoint {
  double at;
  double left_limit;
  double right_limit;
  double value;
  Owner owner;

  bool is_jump() const;
};

/// Strictly monotone function on an open interval, possibly with finitely
/// many jump discontinuities at top-level piecewise breakpoints.
class MonotoneFunction {
 public:
  static constexpr std::size_t kDefaultSamples = 1024;

  /// Validates definedness and strict monotonicity by sampling
  /// `samples_per_piece` points per piece plus the breakpoint limits.
  /// Throws NotMonotone (with a witness pair) or DomainError.
  MonotoneFunction(Expr description, Interval domain,
                   std::size_t samples_per_piece = kDefaultSamples);

  const Expr& description() const noexcept { return description_; }
  const Interval& domain() const noexcept { return domain_; }
  Direction direction() const noexcept { return direction_; }
  bool increasing() const noexcept { return direction_ == Direction::kIncreasing; }
  std::span<const Piece> pieces() const noexcept { return pieces_; }
  std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }
  /// conv(f(I)) as an open interval of extended reals.
  const Interval& range_hull() const noexcept { return range_hull_; }
  /// No breakpoint carries a jump.
  bool continuous() const noexcept;

  /// Throws DomainError outside the domain.
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  /// Throws NotDifferentiable at breakpoints.
  double derivative(double x) const;

  /// Same function on a sub-interval; breakpoints outside `sub` are dropped.
  MonotoneFunction restricted(const Interval& sub) const;

  /// Applies `fn` to every branch and keeps breakpoints/ownership.
  template <class Fn>
  Expr map_branches(Fn&& fn) const {
    if (pieces_.size() == 1) return fn(pieces_.front().branch);
    std::vector<Expr> branches;
    for (const auto& p : pieces_) branches.push_back(fn(p.branch));
    std::vector<double> at;
    std::vector<Owner> owners;
    for (const auto& b : breakpoints_) {
      at.push_back(b.at);
      owners.push_back(b.owner);
    }
    return ex::piecewise(std::move(at), std::move(branches), std::move(owners));
  }

 private:
  const Piece& piece_at(double x) const;

  Expr description_;
  Interval domain_;
  Direction direction_ = Direction::kIncreasing;
  std::vector<Piece> pieces_;
  std::vector<Breakpoint> breakpoints_;
  Interval range_hull_{0, 1};
};

MonotoneFunction build_monotone(Expr description, const Interval& domain);

/// Generalized left inverse of a strictly monotone function: the continuous,
/// monotone extension of f^{-1} to conv(f(I)); constant over jump gaps.
class GeneralizedInverse {
 public:
  explicit GeneralizedInverse(MonotoneFunction f);

  /// Throws RangeError for y strictly outside conv(f(I)).
  double eval(double y) const;
  double operator()(double y) const { return eval(y); }

  const MonotoneFunction& source() const noexcept { return source_; }
  const Interval& range_hull() const noexcept { return source_.range_hull(); }

  /// The inverse as an expression over conv(f(I)): closed-form branch
  /// inverses where available, numeric inverses otherwise, constant plateaus
  /// across gaps.
  Expr as_expr() const;

 private:
  struct Segment {
    double y_lo;
    double y_hi;
    bool plateau;
    double x_value;         // plateau value
    std::size_t piece = 0;  // branch index
    std::optional<Expr> closed_form;
  };

  double invert_branch(const Segment& s, double y) const;

  MonotoneFunction source_;
  std::vector<Segment> segments_;  // ascending in y
};

GeneralizedInverse generalized_inverse(const MonotoneFunction& f);
double inverse_eval(const GeneralizedInverse& finv, double y);

}  // namespace bmeq
