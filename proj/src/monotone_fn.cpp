#include "bmeq/monotone_fn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmeq/error.hpp"
#include "bmeq/numerics.hpp"

namespace bmeq {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

bool Breakpoint::is_jump() const {
  return std::abs(left_limit - right_limit) >
         1e-12 * std::max({1.0, std::abs(left_limit), std::abs(right_limit)});
}

MonotoneFunction::MonotoneFunction(Expr description, Interval domain,
                                   std::size_t samples_per_piece)
    : description_(std::move(description)), domain_(domain) {
  std::vector<double> at;
  std::vector<Expr> branches;
  std::vector<Owner> owners;
  if (const auto* pw = std::get_if<node::Piecewise>(&description_.node().value)) {
    at = pw->breakpoints;
    branches = pw->branches;
    owners = pw->ownership;
  } else {
    branches.push_back(description_);
  }
  for (double b : at) {
    if (!domain_.contains(b)) {
      fail(ErrorKind::kDomain, "breakpoint " + fmt(b) + " outside " + domain_.to_string());
    }
  }

  const std::size_t count = branches.size();
  for (std::size_t k = 0; k < count; ++k) {
    pieces_.push_back(Piece{
        k == 0 ? domain_.lo() : at[k - 1],
        k + 1 == count ? domain_.hi() : at[k],
        branches[k],
        k > 0 && owners[k - 1] == Owner::kRight,
        k + 1 < count && owners[k] == Owner::kLeft,
    });
  }

  // Ordered samples across all pieces and breakpoint values.
  std::vector<std::pair<double, double>> samples;
  for (std::size_t k = 0; k < count; ++k) {
    const Piece& piece = pieces_[k];
    for (double x : Interval(piece.lo, piece.hi).sample(samples_per_piece)) {
      try {
        samples.emplace_back(x, piece.branch.eval(x));
      } catch (const Error& e) {
        fail(ErrorKind::kDomain, "piece " + std::to_string(k) + ": " + e.what());
      }
    }
    if (k + 1 < count) {
      const double b = at[k];
      Breakpoint bp{b, one_sided_limit(piece.branch, b, -1),
                    one_sided_limit(pieces_[k + 1].branch, b, +1), 0, owners[k]};
      const Expr& owner = owners[k] == Owner::kLeft ? piece.branch : pieces_[k + 1].branch;
      try {
        bp.value = owner.eval(b);
      } catch (const Error& e) {
        fail(ErrorKind::kDomain, "owner branch at breakpoint " + fmt(b) + ": " + e.what());
      }
      if (!std::isfinite(bp.left_limit) || !std::isfinite(bp.right_limit)) {
        fail(ErrorKind::kDomain, "one-sided limits at breakpoint " + fmt(b) + " are not finite");
      }
      breakpoints_.push_back(bp);
      samples.emplace_back(b, bp.value);
    }
  }

  if (samples.front().second == samples.back().second) {
    fail(ErrorKind::kNotMonotone, "function takes equal values at " + fmt(samples.front().first) +
                                      " and " + fmt(samples.back().first));
  }
  direction_ = samples.front().second < samples.back().second ? Direction::kIncreasing
                                                               : Direction::kDecreasing;
  const bool inc = increasing();
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto [x0, y0] = samples[i];
    const auto [x1, y1] = samples[i + 1];
    if (inc ? !(y0 < y1) : !(y0 > y1)) {
      fail(ErrorKind::kNotMonotone, "witness pair x = " + fmt(x0) + ", x' = " + fmt(x1) +
                                        " with f(x) = " + fmt(y0) + ", f(x') = " + fmt(y1));
    }
  }
  for (const auto& bp : breakpoints_) {
    if (inc ? bp.left_limit > bp.right_limit : bp.left_limit < bp.right_limit) {
      fail(ErrorKind::kNotMonotone, "jump against the monotone direction at " + fmt(bp.at));
    }
  }

  const double lo = one_sided_limit(pieces_.front().branch, domain_.lo(), +1);
  const double hi = one_sided_limit(pieces_.back().branch, domain_.hi(), -1);
  if (std::isnan(lo) || std::isnan(hi)) {
    fail(ErrorKind::kDomain, "cannot determine the range at the domain ends");
  }
  range_hull_ = Interval(std::min(lo, hi), std::max(lo, hi));
}

MonotoneFunction build_monotone(Expr description, const Interval& domain) {
  return MonotoneFunction(std::move(description), domain);
}

bool MonotoneFunction::continuous() const noexcept {
  return std::none_of(breakpoints_.begin(), breakpoints_.end(),
                      [](const Breakpoint& b) { return b.is_jump(); });
}

const Piece& MonotoneFunction::piece_at(double x) const {
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    if ((p.lo < x || (p.owns_lo && p.lo == x)) && (x < p.hi || (p.owns_hi && p.hi == x))) {
      return p;
    }
  }
  fail(ErrorKind::kDomain, "no piece owns x = " + fmt(x));
}

double MonotoneFunction::eval(double x) const {
  if (!domain_.contains(x)) {
    fail(ErrorKind::kDomain, "x = " + fmt(x) + " outside " + domain_.to_string());
  }
  return piece_at(x).branch.eval(x);
}

double MonotoneFunction::derivative(double x) const {
  if (!domain_.contains(x)) {
    fail(ErrorKind::kDomain, "x = " + fmt(x) + " outside " + domain_.to_string());
  }
  for (const auto& b : breakpoints_) {
    if (b.at == x) fail(ErrorKind::kNotDifferentiable, "x = " + fmt(x) + " is a breakpoint");
  }
  return piece_at(x).branch.derivative(x);
}

MonotoneFunction MonotoneFunction::restricted(const Interval& sub) const {
  if (sub.lo() < domain_.lo() || sub.hi() > domain_.hi()) {
    fail(ErrorKind::kDomain, sub.to_string() + " is not inside " + domain_.to_string());
  }
  if (breakpoints_.empty()) return MonotoneFunction(description_, sub);
  std::vector<double> at;
  std::vector<Expr> branches;
  std::vector<Owner> owners;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    if (p.hi <= sub.lo() || p.lo >= sub.hi()) continue;
    if (!branches.empty()) {
      at.push_back(p.lo);
      owners.push_back(breakpoints_[k - 1].owner);
    }
    branches.push_back(p.branch);
  }
  if (branches.size() == 1) return MonotoneFunction(branches.front(), sub);
  return MonotoneFunction(ex::piecewise(std::move(at), std::move(branches), std::move(owners)),
                          sub);
}

GeneralizedInverse::GeneralizedInverse(MonotoneFunction f) : source_(std::move(f)) {
  const auto pieces = source_.pieces();
  const auto bps = source_.breakpoints();
  const Interval& dom = source_.domain();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double y_start =
        k == 0 ? one_sided_limit(pieces[k].branch, dom.lo(), +1) : bps[k - 1].right_limit;
    const double y_end = k + 1 == pieces.size() ? one_sided_limit(pieces[k].branch, dom.hi(), -1)
                                                : bps[k].left_limit;
    segments_.push_back(Segment{std::min(y_start, y_end), std::max(y_start, y_end), false, 0, k,
                                closed_form_inverse(pieces[k].branch)});
    if (k + 1 < pieces.size()) {
      const auto& b = bps[k];
      segments_.push_back(Segment{std::min(b.left_limit, b.right_limit),
                                  std::max(b.left_limit, b.right_limit), true, b.at, k,
                                  std::nullopt});
    }
  }
  if (!source_.increasing()) std::reverse(segments_.begin(), segments_.end());
}

double GeneralizedInverse::invert_branch(const Segment& s, double y) const {
  const Piece& piece = source_.pieces()[s.piece];
  if (s.closed_form) {
    try {
      const double x = s.closed_form->eval(y);
      return std::clamp(x, piece.lo, piece.hi);
    } catch (const Error&) {
      // Outside the closed form's natural domain; fall through to bisection.
    }
  }
  const double x = numerics::invert_monotone(
      [&](double t) { return piece.branch.eval_unchecked(t); }, y, Interval(piece.lo, piece.hi),
      source_.increasing(), 1e-14);
  return std::clamp(x, piece.lo, piece.hi);
}

double GeneralizedInverse::eval(double y) const {
  const Interval& hull = range_hull();
  if (std::isnan(y) || y < hull.lo() || y > hull.hi()) {
    fail(ErrorKind::kRange, "y = " + fmt(y) + " outside conv(f(I)) = " + hull.to_string());
  }
  const Interval& dom = source_.domain();
  if (y == hull.lo()) return source_.increasing() ? dom.lo() : dom.hi();
  if (y == hull.hi()) return source_.increasing() ? dom.hi() : dom.lo();
  for (const auto& s : segments_) {
    if (s.plateau && s.y_lo <= y && y <= s.y_hi) return s.x_value;
  }
  for (const auto& s : segments_) {
    if (!s.plateau && s.y_lo < y && y < s.y_hi) return invert_branch(s, y);
  }
  fail(ErrorKind::kRange, "y = " + fmt(y) + " not covered by any inverse segment");
}

Expr GeneralizedInverse::as_expr() const {
  auto branch_inverse = [&](const Segment& s) {
    const Piece& piece = source_.pieces()[s.piece];
    if (s.closed_form) {
      // Accept the closed form only if it is defined across the segment.
      bool ok = true;
      const Interval ys(s.y_lo, s.y_hi);
      for (double y : ys.sample(33)) {
        try {
          (void)s.closed_form->eval(y);
        } catch (const Error&) {
          ok = false;
          break;
        }
      }
      if (ok) return *s.closed_form;
    }
    return ex::numeric_inverse(piece.branch, Interval(piece.lo, piece.hi));
  };

  std::vector<double> at;
  std::vector<Expr> branches;
  std::vector<Owner> owners;
  bool previous_plateau = false;
  for (const auto& s : segments_) {
    if (s.plateau && s.y_lo == s.y_hi) continue;
    if (!branches.empty()) {
      at.push_back(s.y_lo);
      owners.push_back(s.plateau ? Owner::kRight : (previous_plateau ? Owner::kLeft : Owner::kRight));
    }
    branches.push_back(s.plateau ? ex::constant(s.x_value) : branch_inverse(s));
    previous_plateau = s.plateau;
  }
  if (branches.size() == 1) return branches.front();
  return ex::piecewise(std::move(at), std::move(branches), std::move(owners));
}

GeneralizedInverse generalized_inverse(const MonotoneFunction& f) { return GeneralizedInverse(f); }

double inverse_eval(const GeneralizedInverse& finv, double y) { return finv.eval(y); }

}  // namespace bmeq
