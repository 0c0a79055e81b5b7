#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbr/dataset.hpp"
#include "pbr/distances.hpp"

namespace pbr {

/// Kernel family: linear, polynomial (coefficient fixed to 1, degree 1..5),
/// or a distance-substituted RBF  K(x, y) = exp(-gamma * D(x, y)).
struct KernelSpec {
  enum class Kind : std::uint8_t { Linear = 0, Polynomial = 1, DistanceRbf = 2 };

  Kind kind = Kind::Linear;
  int degree = 1;                       // Polynomial
  double coef = 1.0;                    // Polynomial additive coefficient (fixed)
  MeasureId measure = MeasureId::PBR;   // DistanceRbf
  double gamma = 1.0;                   // DistanceRbf, > 0

  static KernelSpec linear();
  static KernelSpec polynomial(int degree);
  static KernelSpec distance_rbf(MeasureId measure, double gamma);

  std::string describe() const;
};

/// Kernel value for one pair. Distance-RBF inputs must be L1-normalized;
/// the infinite-distance sentinel maps to kernel value 0.
double kernel_value(const KernelSpec& spec, const FeatureVector& x, const FeatureVector& y);

/// Matrix of pairwise kernel values with provenance. Square self-Grams are
/// exactly symmetric (each unordered pair evaluated once).
class GramMatrix {
 public:
  GramMatrix(std::size_t rows, std::size_t cols, KernelSpec spec);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  const double* row(std::size_t i) const { return values_.data() + i * cols_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const KernelSpec& spec() const noexcept { return spec_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> values_;
  KernelSpec spec_;
};

/// Rectangular Gram: values[i][j] = k(rows[i], cols[j]).
GramMatrix gram(const KernelSpec& spec, const Dataset& row_data, const Dataset& col_data,
                unsigned threads = 0);

/// Square self-Gram over one dataset; symmetric entries computed once.
GramMatrix gram(const KernelSpec& spec, const Dataset& data, unsigned threads = 0);

/// Positive-definiteness audit: attempts a Cholesky factorization with zero
/// jitter and estimates the smallest eigenvalue by shifted power iteration.
/// Errors: NotSquare; NotSymmetric when asymmetry exceeds 1e-10.
struct PdReport {
  bool is_pd = false;
  double min_eigenvalue_estimate = 0.0;
};

PdReport check_pd(const GramMatrix& g);

/// Binary serialization (magic "PBRG", little-endian header, row-major f64).
void save_gram(const GramMatrix& g, const std::string& path);
GramMatrix load_gram(const std::string& path);

}  // namespace pbr
