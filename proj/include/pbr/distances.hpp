#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbr/feature_vector.hpp"

namespace pbr {

/// Closed set of bin-to-bin distance measures.
enum class MeasureId { PBR, BD, JD, CHI2, HELLINGER, HI, L1, L2, L1BRD };

inline constexpr std::array<MeasureId, 9> kAllMeasures = {
    MeasureId::PBR, MeasureId::BD,  MeasureId::JD, MeasureId::CHI2, MeasureId::HELLINGER,
    MeasureId::HI,  MeasureId::L1,  MeasureId::L2, MeasureId::L1BRD};

std::string measure_name(MeasureId id);
std::optional<MeasureId> parse_measure(std::string_view name);

/// Distances operate on L1-normalized inputs by default; Raw skips the
/// normalization check and is outside the validated regime.
enum class InputMode { Normalized, Raw };

/// Per-bin divergence terms between two feature vectors:
///   e_i = a_i ln(2 a_i / (a_i + b_i)) + b_i ln(2 b_i / (a_i + b_i)),
/// with zero terms dropped exactly (t ln(...) -> 0 as t -> 0, and e_i = 0
/// when a_i = b_i). mu and sigma2 are the mean and variance of the number of
/// successes when the e_i are read as Bernoulli probabilities.
struct DifferenceVector {
  std::vector<double> e;
  double mu = 0.0;
  double sigma2 = 0.0;
};

DifferenceVector difference_vector(const FeatureVector& x, const FeatureVector& y,
                                   InputMode mode = InputMode::Normalized);

/// Poisson-Binomial Radius: sigma2 / (N - mu) of the difference vector.
/// Non-negative, symmetric, zero iff x == y; not a metric (semimetric).
/// Errors: DegenerateDenominator when N - mu <= 1e-12 (raw mode only).
double pbr_distance(const FeatureVector& x, const FeatureVector& y,
                    InputMode mode = InputMode::Normalized);

/// Sentinel returned by BD on disjoint supports; kernels map it to 0.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();
inline bool is_infinite_distance(double d) { return d == kInfiniteDistance; }

/// Dispatches to the named measure. All measures assume non-negative inputs;
/// in Normalized mode both arguments must carry the normalized flag.
double evaluate(MeasureId measure, const FeatureVector& x, const FeatureVector& y,
                InputMode mode = InputMode::Normalized);

}  // namespace pbr
