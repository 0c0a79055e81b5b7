#include "pbr/dataset.hpp"

#include <string>

#include "pbr/error.hpp"

namespace pbr {

Dataset::Dataset(std::vector<FeatureVector> vectors, std::vector<int> labels,
                 std::map<int, std::string> class_names)
    : vectors_(std::move(vectors)), labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (vectors_.size() != labels_.size()) {
    raise(ErrorCode::InvariantViolation,
          "vector count " + std::to_string(vectors_.size()) + " != label count " +
              std::to_string(labels_.size()));
  }
  const std::size_t dim = vectors_.empty() ? 0 : vectors_[0].size();
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].size() != dim) {
      raise(ErrorCode::DimensionMismatch,
            "row " + std::to_string(i) + " has dimension " + std::to_string(vectors_[i].size()) +
                ", expected " + std::to_string(dim));
    }
    if (!class_names_.count(labels_[i])) {
      raise(ErrorCode::InvariantViolation,
            "label " + std::to_string(labels_[i]) + " has no class name");
    }
  }
}

Dataset Dataset::normalized() const {
  std::vector<FeatureVector> out;
  out.reserve(vectors_.size());
  for (const auto& v : vectors_) out.push_back(v.normalized() ? v : normalize(v));
  return Dataset(std::move(out), labels_, class_names_);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<FeatureVector> vs;
  std::vector<int> ls;
  vs.reserve(indices.size());
  ls.reserve(indices.size());
  for (std::size_t i : indices) {
    vs.push_back(vectors_[i]);
    ls.push_back(labels_[i]);
  }
  return Dataset(std::move(vs), std::move(ls), class_names_);
}

}  // namespace pbr
