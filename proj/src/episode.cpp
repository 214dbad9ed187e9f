#include "fsnet/episode.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fsnet/error.hpp"

namespace fsnet {

void DatasetSplit::add(std::vector<FeatureTensor> features, std::vector<std::size_t> labels,
                       Phase phase) {
  if (features.size() != labels.size()) {
    throw ValidationError("dataset: " + std::to_string(features.size()) + " features but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features_.empty() && i == 0) {
      shape_ = features[0].shape();
    } else if (features[i].shape() != shape_) {
      throw ValidationError("dataset: sample shape " + to_string(features[i].shape()) +
                            " differs from " + to_string(shape_));
    }
    const auto it = phases_.find(labels[i]);
    if (it != phases_.end() && it->second != phase) {
      throw ValidationError("dataset: class " + std::to_string(labels[i]) + " appears in both " +
                            std::string(to_string(it->second)) + " and " +
                            std::string(to_string(phase)) + " splits");
    }
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    phases_[labels[i]] = phase;
    members_[labels[i]].push_back(features_.size());
    features_.push_back(std::move(features[i]));
    labels_.push_back(labels[i]);
  }
}

std::vector<std::size_t> DatasetSplit::classes(Phase phase) const {
  std::vector<std::size_t> out;
  for (const auto& [cls, p] : phases_) {
    if (p == phase) out.push_back(cls);
  }
  return out;
}

Phase DatasetSplit::phase_of(std::size_t cls) const {
  const auto it = phases_.find(cls);
  if (it == phases_.end()) throw ValidationError("dataset: unknown class " + std::to_string(cls));
  return it->second;
}

std::span<const std::size_t> DatasetSplit::samples_of(std::size_t cls) const {
  const auto it = members_.find(cls);
  if (it == members_.end()) throw ValidationError("dataset: unknown class " + std::to_string(cls));
  return it->second;
}

DatasetSplit DatasetSplit::with_shuffled_labels(std::uint64_t seed) const {
  std::vector<std::size_t> shuffled = labels_;
  for (Phase phase : {Phase::base, Phase::val, Phase::novel}) {
    std::vector<std::size_t> idx;
    for (std::size_t cls : classes(phase)) {
      const auto& m = members_.at(cls);
      idx.insert(idx.end(), m.begin(), m.end());
    }
    std::sort(idx.begin(), idx.end());
    std::vector<std::size_t> values;
    values.reserve(idx.size());
    for (std::size_t i : idx) values.push_back(labels_[i]);
    Rng rng(derive_seed({seed, stream::kLabelShuffle, static_cast<std::uint64_t>(phase)}));
    std::shuffle(values.begin(), values.end(), rng);
    for (std::size_t j = 0; j < idx.size(); ++j) shuffled[idx[j]] = values[j];
  }

  DatasetSplit out;
  out.shape_ = shape_;
  out.features_ = features_;
  out.labels_ = shuffled;
  out.phases_ = phases_;
  for (std::size_t i = 0; i < shuffled.size(); ++i) out.members_[shuffled[i]].push_back(i);
  return out;
}

void Episode::validate() const {
  if (way == 0 || shot == 0 || queries == 0) throw ValidationError("episode: empty shape");
  if (classes.size() != way || support.size() != way * shot ||
      support_labels.size() != support.size() || query.size() != way * queries ||
      query_labels.size() != query.size()) {
    throw ValidationError("episode: inconsistent support/query counts");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support_labels[i] != i / shot) throw ValidationError("episode: support not class-major");
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (query_labels[i] >= way) throw ValidationError("episode: query label out of range");
  }
  const Shape& s = support.front().shape();
  for (const auto& x : support)
    if (x.shape() != s) throw ValidationError("episode: mixed support shapes");
  for (const auto& x : query)
    if (x.shape() != s) throw ValidationError("episode: query shape differs from support");
}

Episode sample_episode(const DatasetSplit& split, Phase phase, std::size_t way, std::size_t shot,
                       std::size_t queries, Rng& rng) {
  if (way == 0 || shot == 0 || queries == 0) {
    throw ConfigError("episode: way, shot and query must all be positive");
  }
  std::vector<std::size_t> pool = split.classes(phase);
  if (pool.size() < way) {
    throw ConfigError("episode: " + std::string(to_string(phase)) + " split has " +
                      std::to_string(pool.size()) + " classes, " + std::to_string(way) +
                      "-way episodes need " + std::to_string(way - pool.size()) + " more");
  }

  // Partial Fisher-Yates: the first `k` slots become a uniform draw without replacement.
  const auto draw = [&rng](std::vector<std::size_t>& items, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
      std::swap(items[i], items[pick(rng)]);
    }
    items.resize(k);
  };

  Episode ep;
  ep.way = way;
  ep.shot = shot;
  ep.queries = queries;
  draw(pool, way);
  ep.classes = pool;

  std::vector<std::vector<std::size_t>> picked(way);
  for (std::size_t k = 0; k < way; ++k) {
    const auto members = split.samples_of(ep.classes[k]);
    if (members.size() < shot + queries) {
      throw ConfigError("episode: class " + std::to_string(ep.classes[k]) + " has " +
                        std::to_string(members.size()) + " samples, needs " +
                        std::to_string(shot + queries) + " (short by " +
                        std::to_string(shot + queries - members.size()) + ")");
    }
    std::vector<std::size_t> ids(members.begin(), members.end());
    draw(ids, shot + queries);
    picked[k] = std::move(ids);
  }

  for (std::size_t k = 0; k < way; ++k) {
    for (std::size_t j = 0; j < shot; ++j) {
      ep.support_ids.push_back(picked[k][j]);
      ep.support.push_back(split.feature(picked[k][j]));
      ep.support_labels.push_back(k);
    }
  }
  for (std::size_t k = 0; k < way; ++k) {
    for (std::size_t j = shot; j < shot + queries; ++j) {
      ep.query_ids.push_back(picked[k][j]);
      ep.query.push_back(split.feature(picked[k][j]));
      ep.query_labels.push_back(k);
    }
  }
  return ep;
}

}  // namespace fsnet
