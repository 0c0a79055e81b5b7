#pragma once

#include <span>
#include <string>
#include <vector>

#include "pbr/kernels.hpp"

namespace pbr {

/// One binary C-SVC problem over a precomputed train x train Gram matrix.
/// Labels are +1/-1; both classes must be present.
struct BinaryProblem {
  const GramMatrix* gram = nullptr;
  std::vector<int> labels;
  double C = 1.0;
};

/// Dual solution of a binary problem. alpha[i] in [0, C]; sv_indices are
/// exactly the indices with alpha > 1e-12. positive_class / negative_class
/// record the class ids behind the +1/-1 split (-1 stands for "rest" in
/// one-vs-rest models).
struct SvmModel {
  std::vector<double> alpha;
  std::vector<int> labels;  // +1/-1, copied from the problem
  double bias = 0.0;
  std::vector<int> sv_indices;
  int positive_class = 1;
  int negative_class = -1;
  double C = 1.0;
  bool converged = true;
};

/// Optional per-iteration trace for solver diagnostics.
struct SmoTrace {
  std::vector<double> dual_objectives;
};

/// Sequential minimal optimization with maximal-violating-pair selection.
/// Stops when the maximal KKT violation is < tol; after max_passes * M
/// iterations the best iterate is returned with converged = false.
/// Errors: InvalidProblem (one-class input, size mismatch, C <= 0).
SvmModel train_binary(const BinaryProblem& problem, double tol = 1e-3, int max_passes = 1000,
                      SmoTrace* trace = nullptr);

/// f(x) = sum_i alpha_i y_i k(x_i, x) + bias for one precomputed kernel row.
double decision_value(const SvmModel& model, std::span<const double> kernel_row);

/// Dual objective sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const SvmModel& model, const BinaryProblem& problem);

/// Largest KKT violation of the model on its training problem.
double max_kkt_violation(const SvmModel& model, const BinaryProblem& problem);

/// One-vs-rest bundle: one binary model per class, in ascending class order.
struct OvrModel {
  std::vector<SvmModel> models;
  std::vector<int> class_order;
  KernelSpec kernel_spec;
  double C = 1.0;
  std::size_t train_size = 0;
};

OvrModel train_ovr(const GramMatrix& train_gram, std::span<const int> labels, double C,
                   double tol = 1e-3, int max_passes = 1000, unsigned threads = 0);

/// Predicts by argmax of decision values over the rows of a test x train
/// kernel matrix; ties break to the lowest class id.
std::vector<int> predict_ovr(const OvrModel& ovr, const GramMatrix& cross);

/// Distinct training indices that are support vectors in any submodel.
int count_svs(const OvrModel& ovr);

/// JSON round-trip ({class order, sparse signed alphas, bias, C, kernel
/// spec}). Loaded models carry labels only at support-vector indices; they
/// predict exactly but are not meant for KKT diagnostics.
std::string ovr_to_json(const OvrModel& ovr);
OvrModel ovr_from_json(const std::string& text);
void save_ovr(const OvrModel& ovr, const std::string& path);
OvrModel load_ovr(const std::string& path);

}  // namespace pbr
