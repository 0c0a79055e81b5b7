#include "pbr/distances.hpp"

#include <algorithm>
#include <cmath>

namespace pbr {

std::string measure_name(MeasureId id) {
  switch (id) {
    case MeasureId::PBR: return "pbr";
    case MeasureId::BD: return "bd";
    case MeasureId::JD: return "jd";
    case MeasureId::CHI2: return "chi2";
    case MeasureId::HELLINGER: return "hellinger";
    case MeasureId::HI: return "hi";
    case MeasureId::L1: return "l1";
    case MeasureId::L2: return "l2";
    case MeasureId::L1BRD: return "l1brd";
  }
  return "?";
}

std::optional<MeasureId> parse_measure(std::string_view name) {
  for (MeasureId id : kAllMeasures) {
    if (measure_name(id) == name) return id;
  }
  return std::nullopt;
}

namespace {

void check_inputs(const FeatureVector& x, const FeatureVector& y, InputMode mode) {
  validate_pair(x, y);
  if (mode == InputMode::Normalized && !(x.normalized() && y.normalized())) {
    raise(ErrorCode::InvariantViolation,
          "inputs must be L1-normalized (use normalize() or InputMode::Raw)");
  }
}

/// One bin's divergence term. Branches on exact zeros: t ln(2t/s) contributes
/// 0 when t = 0, and equal bins give exactly 0.
inline double divergence_term(double a, double b) {
  if (a == b) return 0.0;
  const double s = a + b;
  double t = 0.0;
  if (a > 0.0) t += a * std::log(2.0 * a / s);
  if (b > 0.0) t += b * std::log(2.0 * b / s);
  return t;
}

double bhattacharyya_coefficient(const FeatureVector& x, const FeatureVector& y, InputMode mode) {
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c += std::sqrt(x[i] * y[i]);
  // Cauchy-Schwarz bounds the coefficient by 1 for unit-sum inputs; only
  // rounding can push it past, so clamp in normalized mode.
  if (mode == InputMode::Normalized) c = std::min(c, 1.0);
  return c;
}

double chi_square(const FeatureVector& x, const FeatureVector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = x[i] + y[i];
    if (s == 0.0 || x[i] == y[i]) continue;
    const double diff = x[i] - y[i];
    d += diff * diff / s;
  }
  return d;
}

double histogram_intersection_distance(const FeatureVector& x, const FeatureVector& y) {
  double overlap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) overlap += std::min(x[i], y[i]);
  return std::max(0.0, 1.0 - overlap);
}

double l1_distance(const FeatureVector& x, const FeatureVector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
  return d;
}

double l2_distance(const FeatureVector& x, const FeatureVector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d += diff * diff;
  }
  return std::sqrt(d);
}

/// Ratio-based combination of the L1 distance with per-column harmonic
/// weights: sum_j ||y_j x - x_j y||_1 / (x_j + y_j)^2. Each column term is
/// invariant to the joint scale of the pair; columns empty in both inputs
/// contribute 0.
double l1_bin_ratio_distance(const FeatureVector& x, const FeatureVector& y) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = x[j] + y[j];
    if (s == 0.0) continue;
    double column = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      column += std::abs(x[i] * y[j] - y[i] * x[j]);
    }
    total += column / (s * s);
  }
  return total;
}

}  // namespace

DifferenceVector difference_vector(const FeatureVector& x, const FeatureVector& y,
                                   InputMode mode) {
  check_inputs(x, y, mode);
  DifferenceVector dv;
  dv.e.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = divergence_term(x[i], y[i]);
    dv.e[i] = e;
    dv.mu += e;
    dv.sigma2 += e * (1.0 - e);
  }
  return dv;
}

double pbr_distance(const FeatureVector& x, const FeatureVector& y, InputMode mode) {
  const DifferenceVector dv = difference_vector(x, y, mode);
  const double denom = static_cast<double>(x.size()) - dv.mu;
  if (denom <= 1e-12) {
    raise(ErrorCode::DegenerateDenominator,
          "N - mu = " + std::to_string(denom) + " is not positive");
  }
  return dv.sigma2 / denom;
}

double evaluate(MeasureId measure, const FeatureVector& x, const FeatureVector& y,
                InputMode mode) {
  check_inputs(x, y, mode);
  if (x.values() == y.values()) return 0.0;  // identity of indiscernibles, exact
  switch (measure) {
    case MeasureId::PBR:
      return pbr_distance(x, y, mode);
    case MeasureId::BD: {
      const double c = bhattacharyya_coefficient(x, y, mode);
      if (c == 0.0) return kInfiniteDistance;  // disjoint supports
      return -std::log(c);
    }
    case MeasureId::JD:
      return difference_vector(x, y, mode).mu;
    case MeasureId::CHI2:
      return chi_square(x, y);
    case MeasureId::HELLINGER: {
      const double c = bhattacharyya_coefficient(x, y, mode);
      return std::sqrt(std::max(0.0, 1.0 - c));
    }
    case MeasureId::HI:
      return histogram_intersection_distance(x, y);
    case MeasureId::L1:
      return l1_distance(x, y);
    case MeasureId::L2:
      return l2_distance(x, y);
    case MeasureId::L1BRD:
      return l1_bin_ratio_distance(x, y);
  }
  raise(ErrorCode::InvalidArgument, "unknown measure");
}

}  // namespace pbr
