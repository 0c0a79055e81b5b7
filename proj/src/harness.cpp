#include "pbr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pbr/error.hpp"
#include "pbr/parallel.hpp"
#include "pbr/rng.hpp"
#include "pbr/stats.hpp"
#include "pbr/svm.hpp"

namespace pbr {

std::vector<double> GridSpec::c_values() const {
  std::vector<double> out;
  for (int e = log2_c_min; e <= log2_c_max; e += log2_c_step) out.push_back(std::exp2(e));
  return out;
}

std::vector<double> GridSpec::gamma_values() const {
  std::vector<double> out;
  for (int e = log2_gamma_min; e <= log2_gamma_max; e += log2_gamma_step) {
    out.push_back(std::exp2(e));
  }
  return out;
}

MethodSpec MethodSpec::distance_rbf(MeasureId measure) {
  MethodSpec m;
  m.kind = KernelSpec::Kind::DistanceRbf;
  m.measure = measure;
  return m;
}

MethodSpec MethodSpec::linear() {
  MethodSpec m;
  m.kind = KernelSpec::Kind::Linear;
  return m;
}

MethodSpec MethodSpec::polynomial() {
  MethodSpec m;
  m.kind = KernelSpec::Kind::Polynomial;
  return m;
}

std::string MethodSpec::name() const {
  switch (kind) {
    case KernelSpec::Kind::Linear: return "linear";
    case KernelSpec::Kind::Polynomial: return "polynomial";
    case KernelSpec::Kind::DistanceRbf: return measure_name(measure);
  }
  return "?";
}

KernelSpec MethodSpec::instantiate(double gamma, int degree) const {
  switch (kind) {
    case KernelSpec::Kind::Linear: return KernelSpec::linear();
    case KernelSpec::Kind::Polynomial: return KernelSpec::polynomial(degree);
    case KernelSpec::Kind::DistanceRbf: return KernelSpec::distance_rbf(measure, gamma);
  }
  raise(ErrorCode::InvalidArgument, "unknown method kind");
}

std::vector<MethodSpec> parse_methods(const std::string& comma_separated) {
  std::vector<MethodSpec> out;
  std::stringstream ss(comma_separated);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token == "linear") {
      out.push_back(MethodSpec::linear());
    } else if (token == "polynomial" || token == "poly") {
      out.push_back(MethodSpec::polynomial());
    } else if (auto measure = parse_measure(token)) {
      out.push_back(MethodSpec::distance_rbf(*measure));
    } else {
      raise(ErrorCode::InvalidArgument, "unknown method '" + token + "'");
    }
  }
  if (out.empty()) raise(ErrorCode::InvalidArgument, "no methods given");
  return out;
}

double macro_accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (labels.empty()) raise(ErrorCode::EmptyInput, "macro accuracy of an empty label set");
  if (predictions.size() != labels.size()) {
    raise(ErrorCode::DimensionMismatch, "prediction and label counts differ");
  }
  std::map<int, std::pair<int, int>> per_class;  // class -> (correct, total)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& [correct, total] = per_class[labels[i]];
    ++total;
    if (predictions[i] == labels[i]) ++correct;
  }
  double sum = 0.0;
  for (const auto& [cls, counts] : per_class) {
    sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return 100.0 * sum / static_cast<double>(per_class.size());
}

namespace {

/// Pairwise base matrix from which every grid candidate's kernel is derived:
/// distances for distance-RBF methods, dot products otherwise.
std::vector<double> base_matrix(const MethodSpec& method, const Dataset& rows,
                                const Dataset& cols, unsigned threads) {
  std::vector<double> out(rows.size() * cols.size());
  const bool self = &rows == &cols;
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const std::size_t j0 = self ? i : 0;
    for (std::size_t j = j0; j < cols.size(); ++j) {
      double v;
      if (method.kind == KernelSpec::Kind::DistanceRbf) {
        v = evaluate(method.measure, rows.vector(i), cols.vector(j));
      } else {
        v = 0.0;
        const FeatureVector& a = rows.vector(i);
        const FeatureVector& b = cols.vector(j);
        for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * b[k];
      }
      out[i * cols.size() + j] = v;
      if (self) out[j * rows.size() + i] = v;
    }
  });
  return out;
}

/// Kernel matrix for one grid candidate, from the base matrix.
GramMatrix candidate_gram(const MethodSpec& method, const KernelSpec& spec,
                          const std::vector<double>& base, std::size_t rows, std::size_t cols) {
  GramMatrix g(rows, cols, spec);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double b = base[i * cols + j];
      double v;
      switch (method.kind) {
        case KernelSpec::Kind::DistanceRbf:
          v = is_infinite_distance(b) ? 0.0 : std::exp(-spec.gamma * b);
          break;
        case KernelSpec::Kind::Polynomial: {
          v = 1.0;
          for (int d = 0; d < spec.degree; ++d) v *= b + spec.coef;
          break;
        }
        case KernelSpec::Kind::Linear:
        default:
          v = b;
          break;
      }
      g.at(i, j) = v;
    }
  }
  return g;
}

GramMatrix submatrix(const GramMatrix& g, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols) {
  GramMatrix out(rows.size(), cols.size(), g.spec());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.at(i, j) = g.at(rows[i], cols[j]);
    }
  }
  return out;
}

/// Deterministic stratified fold assignment: per class, shuffle and deal
/// round-robin.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<int> fold_of(labels.size(), 0);
  for (auto& [cls, indices] : by_class) {
    if (static_cast<int>(indices.size()) < folds) {
      raise(ErrorCode::ClassTooSmall,
            "class " + std::to_string(cls) + " has " + std::to_string(indices.size()) +
                " members, needs >= " + std::to_string(folds));
    }
    Rng rng(mix_seed(seed, 0xF01D5ULL + static_cast<std::uint64_t>(cls)));
    rng.shuffle(indices);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      fold_of[indices[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

struct Candidate {
  double C;
  double gamma;
  int degree;
};

std::vector<Candidate> enumerate_candidates(const MethodSpec& method, const GridSpec& grid) {
  std::vector<Candidate> out;
  // C ascending outermost, then gamma/degree ascending: keeping the first of
  // any tie realizes the smaller-C-then-smaller-gamma rule
  for (double c : grid.c_values()) {
    switch (method.kind) {
      case KernelSpec::Kind::Linear:
        out.push_back({c, 1.0, 1});
        break;
      case KernelSpec::Kind::Polynomial:
        for (int d : grid.degrees) out.push_back({c, 1.0, d});
        break;
      case KernelSpec::Kind::DistanceRbf:
        for (double g : grid.gamma_values()) out.push_back({c, g, 1});
        break;
    }
  }
  return out;
}

}  // namespace

BestParams grid_search(const Dataset& train, const MethodSpec& method, const GridSpec& grid,
                       int folds, std::uint64_t seed, unsigned threads) {
  if (folds < 2) raise(ErrorCode::InvalidArgument, "folds must be >= 2");
  const std::vector<int> fold_of = stratified_folds(train.labels(), folds, seed);
  const std::vector<double> base = base_matrix(method, train, train, threads);
  const std::vector<Candidate> candidates = enumerate_candidates(method, grid);

  // per-fold index lists
  std::vector<std::vector<std::size_t>> fit_idx(folds), val_idx(folds);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (int f = 0; f < folds; ++f) {
      (fold_of[i] == f ? val_idx[f] : fit_idx[f]).push_back(i);
    }
  }

  std::vector<double> scores(candidates.size(), 0.0);
  parallel_for(candidates.size(), threads, [&](std::size_t c) {
    const Candidate& cand = candidates[c];
    const KernelSpec spec = method.instantiate(cand.gamma, cand.degree);
    const GramMatrix full = candidate_gram(method, spec, base, train.size(), train.size());
    double accuracy_sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      const GramMatrix sub = submatrix(full, fit_idx[f], fit_idx[f]);
      std::vector<int> sub_labels;
      sub_labels.reserve(fit_idx[f].size());
      for (std::size_t i : fit_idx[f]) sub_labels.push_back(train.label(i));
      const OvrModel model = train_ovr(sub, sub_labels, cand.C, 1e-3, 1000, 1);
      const GramMatrix cross = submatrix(full, val_idx[f], fit_idx[f]);
      const std::vector<int> predictions = predict_ovr(model, cross);
      std::vector<int> val_labels;
      val_labels.reserve(val_idx[f].size());
      for (std::size_t i : val_idx[f]) val_labels.push_back(train.label(i));
      accuracy_sum += macro_accuracy(predictions, val_labels);
    }
    scores[c] = accuracy_sum / folds;
  });

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (scores[c] > scores[best]) best = c;  // strict: first of a tie wins
  }
  return {candidates[best].C, candidates[best].gamma, candidates[best].degree, scores[best]};
}

namespace {

struct RepeatOutcome {
  double accuracy = 0.0;
  int sv_count = 0;
  BestParams params;
};

RepeatOutcome run_one_repeat(const Dataset& data, const BenchmarkConfig& config,
                             const MethodSpec& method, const std::vector<std::size_t>& train_idx,
                             const std::vector<std::size_t>& test_idx, std::uint64_t fold_seed) {
  const Dataset train = data.subset(train_idx);
  const Dataset test = data.subset(test_idx);

  BestParams best = grid_search(train, method, config.grid, config.folds, fold_seed, 1);
  const KernelSpec spec = method.instantiate(best.gamma, best.degree);

  const std::vector<double> train_base = base_matrix(method, train, train, 1);
  const GramMatrix train_gram =
      candidate_gram(method, spec, train_base, train.size(), train.size());
  const OvrModel model =
      train_ovr(train_gram, train.labels(), best.C, config.tol, 1000, 1);

  const std::vector<double> cross_base = base_matrix(method, test, train, 1);
  const GramMatrix cross = candidate_gram(method, spec, cross_base, test.size(), train.size());
  const std::vector<int> predictions = predict_ovr(model, cross);

  RepeatOutcome outcome;
  outcome.accuracy = macro_accuracy(predictions, test.labels());
  outcome.sv_count = count_svs(model);
  outcome.params = best;
  return outcome;
}

}  // namespace

BenchmarkReport run_benchmark(const Dataset& data, const BenchmarkConfig& config) {
  if (config.methods.empty()) raise(ErrorCode::InvalidArgument, "no methods configured");
  if (config.repeats < 1) raise(ErrorCode::InvalidArgument, "repeats must be >= 1");
  if (config.n_train_per_class < 1) {
    raise(ErrorCode::InvalidArgument, "n_train_per_class must be >= 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.label(i)].push_back(i);
  for (const auto& [cls, indices] : by_class) {
    if (indices.size() <= static_cast<std::size_t>(config.n_train_per_class)) {
      raise(ErrorCode::ClassTooSmall,
            "class " + std::to_string(cls) + " needs more than " +
                std::to_string(config.n_train_per_class) + " members");
    }
  }

  const std::size_t repeats = static_cast<std::size_t>(config.repeats);
  const std::size_t methods = config.methods.size();
  std::vector<RepeatOutcome> outcomes(repeats * methods);

  parallel_for(repeats, config.threads, [&](std::size_t r) {
    // shared stratified split for every method in this repeat
    std::vector<std::size_t> train_idx, test_idx;
    for (const auto& [cls, indices] : by_class) {
      std::vector<std::size_t> shuffled = indices;
      Rng rng(mix_seed(mix_seed(config.seed, r), static_cast<std::uint64_t>(cls) + 0x7A31ULL));
      rng.shuffle(shuffled);
      for (std::size_t k = 0; k < shuffled.size(); ++k) {
        (k < static_cast<std::size_t>(config.n_train_per_class) ? train_idx : test_idx)
            .push_back(shuffled[k]);
      }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    const std::uint64_t fold_seed = mix_seed(config.seed, 0xCF01DULL + r);
    for (std::size_t m = 0; m < methods; ++m) {
      outcomes[r * methods + m] =
          run_one_repeat(data, config, config.methods[m], train_idx, test_idx, fold_seed);
    }
  });

  BenchmarkReport report;
  report.seed = config.seed;
  report.repeats = config.repeats;
  report.n_train_per_class = config.n_train_per_class;
  for (std::size_t m = 0; m < methods; ++m) {
    MethodResult result;
    result.method = config.methods[m].name();
    double sum = 0.0, sv_sum = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      const RepeatOutcome& o = outcomes[r * methods + m];
      result.accuracies.push_back(o.accuracy);
      result.chosen.push_back(o.params);
      sum += o.accuracy;
      sv_sum += o.sv_count;
    }
    result.mean = sum / static_cast<double>(repeats);
    double ss = 0.0;
    for (double a : result.accuracies) ss += (a - result.mean) * (a - result.mean);
    result.stddev = repeats > 1 ? std::sqrt(ss / static_cast<double>(repeats - 1)) : 0.0;
    result.mean_sv_count = sv_sum / static_cast<double>(repeats);
    report.methods.push_back(std::move(result));
  }
  return report;
}

SignificanceMatrix compare_methods(const BenchmarkReport& report, const std::string& baseline) {
  const MethodResult* base = nullptr;
  for (const auto& m : report.methods) {
    if (m.method == baseline) base = &m;
  }
  if (base == nullptr) raise(ErrorCode::InvalidArgument, "baseline '" + baseline + "' not found");
  if (report.methods.size() < 2) {
    raise(ErrorCode::InvalidArgument, "need at least 2 methods to compare");
  }

  SignificanceMatrix sig;
  sig.baseline = baseline;
  const std::size_t comparisons = report.methods.size() - 1;
  for (const auto& m : report.methods) {
    if (&m == base) continue;
    if (m.accuracies.size() != base->accuracies.size()) {
      raise(ErrorCode::InvalidArgument, "repeat counts differ between methods");
    }
    MethodComparison cmp;
    cmp.method = m.method;
    std::vector<double> diffs(m.accuracies.size());
    for (std::size_t r = 0; r < diffs.size(); ++r) diffs[r] = m.accuracies[r] - base->accuracies[r];
    try {
      const TestResult t = wilcoxon_signed_rank(m.accuracies, base->accuracies);
      cmp.p_value = t.p_value;
      cmp.significant_05 = t.p_value < 0.05 / static_cast<double>(comparisons);
      cmp.significant_005 = t.p_value < 0.005 / static_cast<double>(comparisons);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllZeroDifferences) throw;
      cmp.identical = true;
      cmp.p_value = 1.0;
    }
    std::sort(diffs.begin(), diffs.end());
    const std::size_t mid = diffs.size() / 2;
    const double median =
        diffs.size() % 2 == 1 ? diffs[mid] : 0.5 * (diffs[mid - 1] + diffs[mid]);
    cmp.direction = median > 0.0 ? 1 : (median < 0.0 ? -1 : 0);
    sig.comparisons.push_back(std::move(cmp));
  }
  return sig;
}

namespace {

nlohmann::json report_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["repeats"] = report.repeats;
  j["n_train_per_class"] = report.n_train_per_class;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : report.methods) {
    nlohmann::json entry;
    entry["method"] = m.method;
    entry["accuracies"] = m.accuracies;
    entry["mean"] = m.mean;
    entry["stddev"] = m.stddev;
    entry["mean_sv_count"] = m.mean_sv_count;
    nlohmann::json chosen = nlohmann::json::array();
    for (const auto& p : m.chosen) {
      chosen.push_back({{"C", p.C}, {"gamma", p.gamma}, {"degree", p.degree},
                        {"cv_accuracy", p.cv_accuracy}});
    }
    entry["chosen"] = std::move(chosen);
    methods.push_back(std::move(entry));
  }
  j["methods"] = std::move(methods);
  return j;
}

nlohmann::json significance_json(const SignificanceMatrix& sig) {
  nlohmann::json j;
  j["baseline"] = sig.baseline;
  nlohmann::json comparisons = nlohmann::json::array();
  for (const auto& c : sig.comparisons) {
    comparisons.push_back({{"method", c.method},
                           {"p_value", c.p_value},
                           {"significant_05", c.significant_05},
                           {"significant_005", c.significant_005},
                           {"direction", c.direction},
                           {"identical", c.identical}});
  }
  j["comparisons"] = std::move(comparisons);
  return j;
}

}  // namespace

std::string benchmark_to_json(const BenchmarkReport& report, const SignificanceMatrix& sig) {
  nlohmann::json j;
  j["benchmark"] = report_json(report);
  j["significance"] = significance_json(sig);
  return j.dump(2) + "\n";
}

std::string benchmark_to_csv(const BenchmarkReport& report, const SignificanceMatrix& sig) {
  std::string out = "method,mean,std,sv_mean,significant_05,significant_005\n";
  char buffer[160];
  for (const auto& m : report.methods) {
    std::string s05 = "baseline", s005 = "baseline";
    for (const auto& c : sig.comparisons) {
      if (c.method == m.method) {
        s05 = c.significant_05 ? "yes" : "no";
        s005 = c.significant_005 ? "yes" : "no";
      }
    }
    std::snprintf(buffer, sizeof(buffer), "%s,%.17g,%.17g,%.17g,%s,%s\n", m.method.c_str(),
                  m.mean, m.stddev, m.mean_sv_count, s05.c_str(), s005.c_str());
    out += buffer;
  }
  return out;
}

}  // namespace pbr
