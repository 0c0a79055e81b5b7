#include "pbr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pbr/error.hpp"
#include "pbr/parallel.hpp"

namespace pbr {

namespace {

constexpr double kSvThreshold = 1e-12;

void check_problem(const BinaryProblem& problem) {
  if (problem.gram == nullptr || problem.gram->rows() != problem.gram->cols()) {
    raise(ErrorCode::InvalidProblem, "binary problem needs a square train gram");
  }
  if (problem.labels.size() != problem.gram->rows()) {
    raise(ErrorCode::InvalidProblem, "label count does not match gram dimension");
  }
  if (!(problem.C > 0.0)) {
    raise(ErrorCode::InvalidProblem, "C must be positive");
  }
  bool has_pos = false, has_neg = false;
  for (int y : problem.labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else raise(ErrorCode::InvalidProblem, "labels must be +1/-1");
  }
  if (!has_pos || !has_neg) {
    raise(ErrorCode::InvalidProblem, "both classes must be present");
  }
}

}  // namespace

SvmModel train_binary(const BinaryProblem& problem, double tol, int max_passes,
                      SmoTrace* trace) {
  check_problem(problem);
  if (!(tol > 0.0)) raise(ErrorCode::InvalidArgument, "tol must be positive");

  const GramMatrix& k = *problem.gram;
  const std::vector<int>& y = problem.labels;
  const std::size_t m = y.size();
  const double c_cap = problem.C;

  std::vector<double> alpha(m, 0.0);
  std::vector<double> grad(m, -1.0);  // gradient of 1/2 a'Qa - e'a at a = 0

  const auto in_up = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] < c_cap) || (y[t] == -1 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] == -1 && alpha[t] < c_cap) || (y[t] == 1 && alpha[t] > 0.0);
  };

  const long long max_iterations =
      static_cast<long long>(max_passes) * static_cast<long long>(m);
  bool converged = false;
  double m_up = 0.0, m_low = 0.0;

  const auto record_trace = [&] {
    if (trace == nullptr) return;
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += alpha[i];
    for (std::size_t i = 0; i < m; ++i) {
      if (alpha[i] == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (alpha[j] == 0.0) continue;
        obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * k.at(i, j);
      }
    }
    trace->dual_objectives.push_back(obj);
  };
  record_trace();

  for (long long iter = 0;; ++iter) {
    // maximal violating pair (lowest index on ties)
    long i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = static_cast<long>(t);
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = static_cast<long>(t);
      }
    }
    if (i < 0 || j < 0 || m_up - m_low < tol) {
      converged = true;
      break;
    }
    if (iter >= max_iterations) break;  // best iterate kept, flagged below

    const std::size_t ii = static_cast<std::size_t>(i);
    const std::size_t jj = static_cast<std::size_t>(j);

    // move along the feasible direction alpha_i += y_i t, alpha_j -= y_j t;
    // the pair selection guarantees descent for t > 0
    const double ui = static_cast<double>(y[ii]);
    const double uj = -static_cast<double>(y[jj]);
    const double eta = k.at(ii, ii) + k.at(jj, jj) - 2.0 * k.at(ii, jj);
    const double slope = ui * grad[ii] + uj * grad[jj];

    // feasible step interval from both box constraints
    double t_lo, t_hi;
    if (ui > 0.0) {
      t_lo = -alpha[ii];
      t_hi = c_cap - alpha[ii];
    } else {
      t_lo = alpha[ii] - c_cap;
      t_hi = alpha[ii];
    }
    if (uj > 0.0) {
      t_lo = std::max(t_lo, -alpha[jj]);
      t_hi = std::min(t_hi, c_cap - alpha[jj]);
    } else {
      t_lo = std::max(t_lo, alpha[jj] - c_cap);
      t_hi = std::min(t_hi, alpha[jj]);
    }

    double step;
    if (eta > 0.0) {
      step = std::clamp(-slope / eta, t_lo, t_hi);
    } else {
      // non-positive curvature: objective is concave along the segment, so
      // the minimum sits at an endpoint
      const auto delta = [&](double t) { return 0.5 * eta * t * t + slope * t; };
      step = delta(t_lo) <= delta(t_hi) ? t_lo : t_hi;
    }
    if (step == 0.0) {
      converged = false;  // selected pair cannot move; avoid spinning
      break;
    }

    const double old_i = alpha[ii];
    const double old_j = alpha[jj];
    alpha[ii] = std::clamp(old_i + ui * step, 0.0, c_cap);
    alpha[jj] = std::clamp(old_j + uj * step, 0.0, c_cap);
    // snap whichever variable hit its bound exactly onto the bound
    if (step == t_lo || step == t_hi) {
      if (old_i + ui * step <= 0.0) alpha[ii] = 0.0;
      if (old_i + ui * step >= c_cap) alpha[ii] = c_cap;
      if (old_j + uj * step <= 0.0) alpha[jj] = 0.0;
      if (old_j + uj * step >= c_cap) alpha[jj] = c_cap;
    }

    const double di = alpha[ii] - old_i;
    const double dj = alpha[jj] - old_j;
    for (std::size_t t = 0; t < m; ++t) {
      grad[t] += y[t] * (y[ii] * k.at(t, ii) * di + y[jj] * k.at(t, jj) * dj);
    }
    record_trace();
  }

  // bias: average of -y g over free support vectors, else the midpoint of
  // the bound-derived interval
  double bias = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (std::size_t t = 0; t < m; ++t) {
    if (alpha[t] > kSvThreshold && c_cap - alpha[t] > kSvThreshold) {
      free_sum += -y[t] * grad[t];
      ++free_count;
    }
  }
  if (free_count > 0) {
    bias = free_sum / free_count;
  } else {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t)) up = std::max(up, v);
      if (in_low(t)) low = std::min(low, v);
    }
    if (std::isfinite(up) && std::isfinite(low)) {
      bias = 0.5 * (up + low);
    } else if (std::isfinite(up)) {
      bias = up;
    } else if (std::isfinite(low)) {
      bias = low;
    }
  }

  SvmModel model;
  model.alpha = std::move(alpha);
  model.labels = y;
  model.C = c_cap;
  model.converged = converged;
  model.bias = bias;
  for (std::size_t t = 0; t < m; ++t) {
    if (model.alpha[t] > kSvThreshold) model.sv_indices.push_back(static_cast<int>(t));
  }
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> kernel_row) {
  if (kernel_row.size() != model.alpha.size()) {
    raise(ErrorCode::DimensionMismatch,
          "kernel row length " + std::to_string(kernel_row.size()) + " != training size " +
              std::to_string(model.alpha.size()));
  }
  double f = model.bias;
  for (int idx : model.sv_indices) {
    f += model.alpha[idx] * model.labels[idx] * kernel_row[idx];
  }
  return f;
}

double dual_objective(const SvmModel& model, const BinaryProblem& problem) {
  const GramMatrix& k = *problem.gram;
  double obj = 0.0;
  for (int idx : model.sv_indices) obj += model.alpha[idx];
  for (int a : model.sv_indices) {
    for (int b : model.sv_indices) {
      obj -= 0.5 * model.alpha[a] * model.alpha[b] * model.labels[a] * model.labels[b] *
             k.at(a, b);
    }
  }
  return obj;
}

double max_kkt_violation(const SvmModel& model, const BinaryProblem& problem) {
  const GramMatrix& k = *problem.gram;
  const std::size_t m = model.alpha.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double u = 0.0;
    for (int idx : model.sv_indices) {
      u += model.alpha[idx] * model.labels[idx] * k.at(i, idx);
    }
    const double margin = model.labels[i] * (u + model.bias);
    double violation;
    if (model.alpha[i] <= kSvThreshold) {
      violation = std::max(0.0, 1.0 - margin);
    } else if (model.C - model.alpha[i] <= kSvThreshold) {
      violation = std::max(0.0, margin - 1.0);
    } else {
      violation = std::abs(margin - 1.0);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

OvrModel train_ovr(const GramMatrix& train_gram, std::span<const int> labels, double C,
                   double tol, int max_passes, unsigned threads) {
  if (labels.size() != train_gram.rows()) {
    raise(ErrorCode::InvalidProblem, "label count does not match gram dimension");
  }
  std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) {
    raise(ErrorCode::InvalidProblem, "one-vs-rest needs at least 2 classes");
  }

  OvrModel ovr;
  ovr.class_order.assign(classes.begin(), classes.end());
  ovr.kernel_spec = train_gram.spec();
  ovr.C = C;
  ovr.train_size = train_gram.rows();
  ovr.models.resize(ovr.class_order.size());

  parallel_for(ovr.class_order.size(), threads, [&](std::size_t c) {
    const int cls = ovr.class_order[c];
    BinaryProblem problem;
    problem.gram = &train_gram;
    problem.C = C;
    problem.labels.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      problem.labels[i] = labels[i] == cls ? 1 : -1;
    }
    SvmModel model = train_binary(problem, tol, max_passes);
    model.positive_class = cls;
    model.negative_class = -1;
    ovr.models[c] = std::move(model);
  });
  return ovr;
}

std::vector<int> predict_ovr(const OvrModel& ovr, const GramMatrix& cross) {
  if (cross.cols() != ovr.train_size) {
    raise(ErrorCode::DimensionMismatch, "kernel rows do not match training size");
  }
  std::vector<int> predictions(cross.rows());
  for (std::size_t r = 0; r < cross.rows(); ++r) {
    const std::span<const double> row(cross.row(r), cross.cols());
    double best = -std::numeric_limits<double>::infinity();
    int best_class = ovr.class_order.front();
    for (std::size_t c = 0; c < ovr.models.size(); ++c) {
      const double f = decision_value(ovr.models[c], row);
      if (f > best) {  // strict: ties keep the lowest class id
        best = f;
        best_class = ovr.class_order[c];
      }
    }
    predictions[r] = best_class;
  }
  return predictions;
}

int count_svs(const OvrModel& ovr) {
  std::set<int> distinct;
  for (const SvmModel& model : ovr.models) {
    distinct.insert(model.sv_indices.begin(), model.sv_indices.end());
  }
  return static_cast<int>(distinct.size());
}

namespace {

nlohmann::json spec_to_json(const KernelSpec& spec) {
  nlohmann::json j;
  switch (spec.kind) {
    case KernelSpec::Kind::Linear:
      j["kind"] = "linear";
      break;
    case KernelSpec::Kind::Polynomial:
      j["kind"] = "polynomial";
      j["degree"] = spec.degree;
      j["coef"] = spec.coef;
      break;
    case KernelSpec::Kind::DistanceRbf:
      j["kind"] = "distance_rbf";
      j["measure"] = measure_name(spec.measure);
      j["gamma"] = spec.gamma;
      break;
  }
  return j;
}

KernelSpec spec_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return KernelSpec::linear();
  if (kind == "polynomial") return KernelSpec::polynomial(j.at("degree").get<int>());
  if (kind == "distance_rbf") {
    const auto measure = parse_measure(j.at("measure").get<std::string>());
    if (!measure) raise(ErrorCode::ParseError, "unknown measure in kernel spec");
    return KernelSpec::distance_rbf(*measure, j.at("gamma").get<double>());
  }
  raise(ErrorCode::ParseError, "unknown kernel kind: " + kind);
}

}  // namespace

std::string ovr_to_json(const OvrModel& ovr) {
  nlohmann::json j;
  j["format"] = "ovr-svm";
  j["version"] = 1;
  j["train_size"] = ovr.train_size;
  j["C"] = ovr.C;
  j["kernel"] = spec_to_json(ovr.kernel_spec);
  j["classes"] = ovr.class_order;
  nlohmann::json models = nlohmann::json::array();
  for (const SvmModel& model : ovr.models) {
    nlohmann::json entry;
    entry["positive_class"] = model.positive_class;
    entry["bias"] = model.bias;
    entry["converged"] = model.converged;
    nlohmann::json alphas = nlohmann::json::array();
    for (int idx : model.sv_indices) {
      // sign carries the binary label of the support vector
      alphas.push_back({idx, model.alpha[idx] * model.labels[idx]});
    }
    entry["alphas"] = alphas;
    models.push_back(std::move(entry));
  }
  j["models"] = std::move(models);
  return j.dump(2) + "\n";
}

OvrModel ovr_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ovr-svm") {
      raise(ErrorCode::ParseError, "not an ovr-svm model document");
    }
    OvrModel ovr;
    ovr.train_size = j.at("train_size").get<std::size_t>();
    ovr.C = j.at("C").get<double>();
    ovr.kernel_spec = spec_from_json(j.at("kernel"));
    ovr.class_order = j.at("classes").get<std::vector<int>>();
    for (const auto& entry : j.at("models")) {
      SvmModel model;
      model.C = ovr.C;
      model.positive_class = entry.at("positive_class").get<int>();
      model.negative_class = -1;
      model.bias = entry.at("bias").get<double>();
      model.converged = entry.at("converged").get<bool>();
      model.alpha.assign(ovr.train_size, 0.0);
      model.labels.assign(ovr.train_size, 1);
      for (const auto& pair : entry.at("alphas")) {
        const int idx = pair.at(0).get<int>();
        const double signed_alpha = pair.at(1).get<double>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= ovr.train_size) {
          raise(ErrorCode::ParseError, "support-vector index out of range");
        }
        model.alpha[idx] = std::abs(signed_alpha);
        model.labels[idx] = signed_alpha >= 0.0 ? 1 : -1;
        model.sv_indices.push_back(idx);
      }
      ovr.models.push_back(std::move(model));
    }
    return ovr;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
}

void save_ovr(const OvrModel& ovr, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << ovr_to_json(ovr);
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

OvrModel load_ovr(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ovr_from_json(buffer.str());
}

}  // namespace pbr
