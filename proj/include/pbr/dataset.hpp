#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbr/feature_vector.hpp"

namespace pbr {

/// A labelled collection of feature vectors with a uniform dimension.
/// Immutable after construction; safe to share across threads.
class Dataset {
 public:
  Dataset(std::vector<FeatureVector> vectors, std::vector<int> labels,
          std::map<int, std::string> class_names);

  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dimension() const noexcept { return vectors_.empty() ? 0 : vectors_[0].size(); }
  const FeatureVector& vector(std::size_t i) const { return vectors_[i]; }
  const std::vector<FeatureVector>& vectors() const noexcept { return vectors_; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::map<int, std::string>& class_names() const noexcept { return class_names_; }
  std::size_t num_classes() const noexcept { return class_names_.size(); }

  /// Copy with every vector L1-normalized.
  Dataset normalized() const;

  /// Subset by row indices (labels and class names carried over).
  Dataset subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<FeatureVector> vectors_;
  std::vector<int> labels_;
  std::map<int, std::string> class_names_;
};

}  // namespace pbr
