#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fsnet/config.hpp"
#include "fsnet/rng.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

/// Labeled feature maps whose classes are partitioned into base / val / novel.
/// A class may belong to exactly one phase; add() rejects anything else.
class DatasetSplit {
 public:
  DatasetSplit() = default;

  /// Appends samples whose classes all belong to `phase`.
  void add(std::vector<FeatureTensor> features, std::vector<std::size_t> labels, Phase phase);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return features_.size(); }
  bool empty() const noexcept { return features_.empty(); }

  const FeatureTensor& feature(std::size_t i) const { return features_.at(i); }
  std::size_t label(std::size_t i) const { return labels_.at(i); }

  /// Class ids tagged with `phase`, ascending.
  std::vector<std::size_t> classes(Phase phase) const;
  std::size_t class_count() const noexcept { return phases_.size(); }
  Phase phase_of(std::size_t cls) const;

  /// Sample indices of one class, in insertion order.
  std::span<const std::size_t> samples_of(std::size_t cls) const;

  /// Copy whose labels are randomly permuted among the samples of each phase.
  /// Per-class sample counts and the phase partition are preserved, but labels
  /// no longer carry information about content.
  DatasetSplit with_shuffled_labels(std::uint64_t seed) const;

 private:
  Shape shape_{};
  std::vector<FeatureTensor> features_;
  std::vector<std::size_t> labels_;
  std::map<std::size_t, Phase> phases_;
  std::map<std::size_t, std::vector<std::size_t>> members_;
};

/// One N-way K-shot task. Episode-local labels are positions in `classes`.
struct Episode {
  std::size_t way = 0;
  std::size_t shot = 0;
  std::size_t queries = 0;
  std::vector<std::size_t> classes;  // global class id per episode label

  std::vector<FeatureTensor> support;  // class-major, `shot` per class
  std::vector<std::size_t> support_labels;
  std::vector<std::size_t> support_ids;

  std::vector<FeatureTensor> query;  // class-major, `queries` per class
  std::vector<std::size_t> query_labels;
  std::vector<std::size_t> query_ids;

  /// Throws ValidationError if counts, labels or shapes are inconsistent.
  void validate() const;
};

/// Draws `way` classes of `phase` without replacement, then `shot + queries`
/// samples per class without replacement; the first `shot` go to the support set.
Episode sample_episode(const DatasetSplit& split, Phase phase, std::size_t way, std::size_t shot,
                       std::size_t queries, Rng& rng);

}  // namespace fsnet
