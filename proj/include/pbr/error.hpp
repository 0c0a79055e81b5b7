#pragma once

#include <stdexcept>
#include <string>

namespace pbr {

enum class ErrorCode {
  AllZero,
  NegativeElement,
  DimensionMismatch,
  InvariantViolation,
  DegenerateDenominator,
  ProbabilityOutOfRange,
  NotSquare,
  NotSymmetric,
  InvalidProblem,
  EmptySample,
  AllZeroDifferences,
  EmptyInput,
  ClassTooSmall,
  ParseError,
  InvalidArgument,
  IoError,
};

/// Library-wide exception carrying a machine-checkable code and, where it
/// applies, the offending element/line index (-1 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long index = -1)
      : std::runtime_error(message), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  long index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  long index_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message, long index = -1) {
  throw Error(code, message, index);
}

}  // namespace pbr
