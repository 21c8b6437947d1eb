#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmeq {

enum class ErrorKind {
  kDomain,
  kRange,
  kNotMonotone,
  kNotDifferentiable,
  kNotContinuous,
  kIterationCap,
  kSubdivisionCap,
  kDegenerate,
  kBadIndices,
  kSignViolation,
  kFitFailed,
  kConfig,
  kParse,
};

std::string_view to_string(ErrorKind kind);

// Single exception type; callers switch on kind() when they care.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace bmeq
