#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pbr/dataset.hpp"

namespace pbr {

/// CSV interchange format: header `label,f0,f1,...`, UTF-8, LF endings,
/// label strings in the first column, non-negative numeric features after.
/// Errors: ParseError (with line number), NegativeElement.
Dataset load_csv(const std::string& path);

/// Writes with 17 significant digits so load_csv(save_csv(d)) is bit-exact.
void save_csv(const Dataset& data, const std::string& path);

/// Binary alternative (magic "PBRF", little-endian header, row-major f64,
/// then the label table).
Dataset load_features_binary(const std::string& path);
void save_features_binary(const Dataset& data, const std::string& path);

/// Numeric-column CSV for the two-sample test commands: header row, all
/// columns numeric, returned column-wise.
std::vector<std::vector<double>> load_columns_csv(const std::string& path);

/// Synthetic histogram-like data: one Dirichlet cluster per class. Class
/// centers move away from the uniform barycenter as `separation` grows, and
/// samples tighten around their center as `concentration` grows. Output
/// vectors are normalized by construction. Deterministic in `seed`.
Dataset synth_dirichlet(int classes, int dims, int per_class, double concentration,
                        double separation, std::uint64_t seed);

/// The worked example triple: normalized forms of [1,15,24,32,2],
/// [3,15,26,33,52] and [20,20,20,20,20].
std::array<FeatureVector, 3> toy_fixture();

/// Frozen triple (x, y, z) violating the triangle inequality for the PBR
/// distance: pbr(x,z) > pbr(x,y) + pbr(y,z). Found by randomized search and
/// committed; the margin is about 0.305.
std::array<FeatureVector, 3> semimetric_witness();

}  // namespace pbr
