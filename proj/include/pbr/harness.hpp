#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbr/dataset.hpp"
#include "pbr/kernels.hpp"

namespace pbr {

/// Hyperparameter candidate grid: log2 C in [-2, 16] and log2 gamma in
/// [-4, 8], both step 2; polynomial degrees 1..5.
struct GridSpec {
  int log2_c_min = -2;
  int log2_c_max = 16;
  int log2_c_step = 2;
  int log2_gamma_min = -4;
  int log2_gamma_max = 8;
  int log2_gamma_step = 2;
  std::vector<int> degrees = {1, 2, 3, 4, 5};

  std::vector<double> c_values() const;
  std::vector<double> gamma_values() const;
};

/// A kernel family whose free parameters come from the grid: one of the
/// distance-substituted RBFs (identified by measure), linear, or polynomial.
struct MethodSpec {
  KernelSpec::Kind kind = KernelSpec::Kind::DistanceRbf;
  MeasureId measure = MeasureId::PBR;

  static MethodSpec distance_rbf(MeasureId measure);
  static MethodSpec linear();
  static MethodSpec polynomial();

  std::string name() const;
  KernelSpec instantiate(double gamma, int degree) const;
};

/// Parses "pbr", "bd", ..., "linear", "polynomial"/"poly".
std::vector<MethodSpec> parse_methods(const std::string& comma_separated);

struct BestParams {
  double C = 1.0;
  double gamma = 1.0;
  int degree = 1;
  double cv_accuracy = 0.0;
};

/// Stratified k-fold cross-validated grid search; ties go to the smaller C,
/// then the smaller gamma (or degree). Inputs must be normalized for
/// distance-RBF methods. Errors: ClassTooSmall when a class has fewer than
/// `folds` members.
BestParams grid_search(const Dataset& train, const MethodSpec& method, const GridSpec& grid,
                       int folds, std::uint64_t seed, unsigned threads = 0);

/// Mean of per-class accuracies, in percent. Errors: EmptyInput,
/// DimensionMismatch.
double macro_accuracy(std::span<const int> predictions, std::span<const int> labels);

struct BenchmarkConfig {
  std::vector<MethodSpec> methods;
  int n_train_per_class = 10;
  int repeats = 100;
  GridSpec grid;
  int folds = 5;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct MethodResult {
  std::string method;
  std::vector<double> accuracies;     // one per repeat, percent
  double mean = 0.0;
  double stddev = 0.0;                // sample standard deviation
  double mean_sv_count = 0.0;
  std::vector<BestParams> chosen;     // one per repeat
};

struct BenchmarkReport {
  std::vector<MethodResult> methods;
  std::uint64_t seed = 0;
  int repeats = 0;
  int n_train_per_class = 0;
};

/// Repeated stratified subsampling benchmark: per repeat, one shared train
/// split for all methods, per-method grid search, final training on the full
/// split, macro accuracy on the remainder, and SV accounting. Deterministic
/// in (seed, config) independent of the thread count.
BenchmarkReport run_benchmark(const Dataset& data, const BenchmarkConfig& config);

struct MethodComparison {
  std::string method;
  double p_value = 1.0;            // Wilcoxon signed-rank on paired accuracies
  bool significant_05 = false;     // Bonferroni-corrected alpha = 0.05
  bool significant_005 = false;    // Bonferroni-corrected alpha = 0.005
  int direction = 0;               // sign of median(method - baseline)
  bool identical = false;
};

struct SignificanceMatrix {
  std::string baseline;
  std::vector<MethodComparison> comparisons;
};

/// Baseline-vs-each-method Wilcoxon comparison over per-repeat accuracies,
/// Bonferroni-corrected over the number of comparisons.
SignificanceMatrix compare_methods(const BenchmarkReport& report, const std::string& baseline);

std::string benchmark_to_json(const BenchmarkReport& report, const SignificanceMatrix& sig);
std::string benchmark_to_csv(const BenchmarkReport& report, const SignificanceMatrix& sig);

}  // namespace pbr
