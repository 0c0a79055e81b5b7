#include "pbr/feature_vector.hpp"

#include <cmath>
#include <string>

namespace pbr {

namespace {

constexpr double kUnitSumTolerance = 1e-12;

void check_invariants(const std::vector<double>& values, bool normalized) {
  if (values.size() < 2) {
    raise(ErrorCode::InvariantViolation,
          "feature vector needs dimension >= 2, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0)) {  // catches negatives and NaN
      raise(ErrorCode::NegativeElement,
            "negative or non-finite element at index " + std::to_string(i),
            static_cast<long>(i));
    }
  }
  if (normalized) {
    double sum = 0.0;
    for (double v : values) sum += v;
    if (std::abs(sum - 1.0) > kUnitSumTolerance) {
      raise(ErrorCode::InvariantViolation,
            "normalized flag set but element sum is " + std::to_string(sum));
    }
  }
}

}  // namespace

FeatureVector::FeatureVector(std::vector<double> values, bool normalized)
    : values_(std::move(values)), normalized_(normalized) {
  check_invariants(values_, normalized_);
}

double FeatureVector::sum() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

FeatureVector normalize(const FeatureVector& v) {
  const double total = v.sum();
  if (total <= 0.0) {
    raise(ErrorCode::AllZero, "cannot normalize: all elements are zero");
  }
  std::vector<double> scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = v[i] / total;
  return FeatureVector(std::move(scaled), true);
}

void validate_pair(const FeatureVector& x, const FeatureVector& y) {
  if (x.size() != y.size()) {
    raise(ErrorCode::DimensionMismatch,
          "dimension mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  for (const FeatureVector* v : {&x, &y}) {
    if (v->size() < 2) {
      raise(ErrorCode::InvariantViolation, "feature vector dimension below 2");
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!((*v)[i] >= 0.0)) {
        raise(ErrorCode::InvariantViolation,
              "invariant violated: element " + std::to_string(i) + " is negative",
              static_cast<long>(i));
      }
    }
    if (v->normalized()) {
      if (std::abs(v->sum() - 1.0) > 1e-12) {
        raise(ErrorCode::InvariantViolation, "normalized flag inconsistent with element sum");
      }
    }
  }
}

}  // namespace pbr
