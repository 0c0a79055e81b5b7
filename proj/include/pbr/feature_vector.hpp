#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pbr/error.hpp"

namespace pbr {

/// A dense non-negative feature vector (histogram or descriptor) of dimension
/// N >= 2. Immutable after construction; the `normalized` flag records that
/// the elements sum to 1 (checked to 1e-12 at construction).
class FeatureVector {
 public:
  explicit FeatureVector(std::vector<double> values, bool normalized = false);

  /// Skips validation; for internal producers whose output is valid by
  /// construction. Test code also uses it to forge invalid vectors.
  static FeatureVector unchecked(std::vector<double> values, bool normalized = false) {
    return FeatureVector(Unchecked{}, std::move(values), normalized);
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool normalized() const noexcept { return normalized_; }
  double sum() const noexcept;

  bool operator==(const FeatureVector& other) const noexcept {
    return values_ == other.values_;
  }

 private:
  struct Unchecked {};
  FeatureVector(Unchecked, std::vector<double> values, bool normalized)
      : values_(std::move(values)), normalized_(normalized) {}

  std::vector<double> values_;
  bool normalized_;
};

/// Scales v to unit sum, preserving order. Errors: AllZero when the sum is 0.
FeatureVector normalize(const FeatureVector& v);

/// Checks that x and y share a dimension and both satisfy the FeatureVector
/// invariants. Errors: DimensionMismatch, InvariantViolation (with index).
void validate_pair(const FeatureVector& x, const FeatureVector& y);

}  // namespace pbr
