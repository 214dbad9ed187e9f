#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fsnet/config.hpp"
#include "fsnet/episode.hpp"
#include "fsnet/params.hpp"
#include "fsnet/subspace.hpp"

namespace fsnet {

/// The subset of Config that shapes one forward pass.
struct PipelineOptions {
  Variant variant = Variant::v3;
  double tau = 0.3;
  double epsilon = 1e-6;
  double jitter = 1e-5;
  std::size_t d_max = 5;
  FusionSpace fusion_space = FusionSpace::similarity;
  SpatialPool spatial_pool = SpatialPool::none;

  static PipelineOptions from(const Config& config);
};

struct EpisodeResult {
  std::size_t correct = 0;
  double accuracy = 0.0;
  Eigen::MatrixXd logits;                // queries x way
  std::vector<DualDistance> distances;   // queries x way, row-major
  std::vector<std::size_t> predicted;    // episode-local labels
  std::vector<std::size_t> labels;       // episode-local ground truth
  std::vector<std::size_t> classes;      // global id per episode label
  std::array<double, 2> alpha{1.0, 0.0}; // fusion weights used (spatial, shape)
  std::vector<DualSubspace> subspaces;   // one per episode class
};

/// Parameter-independent part of an episode's forward pass: the spatial view,
/// its subspaces, and the low-pass reconstruction of every sample per channel.
/// Channel attention only rescales those channels, so the shape view for any
/// ModelParams is a cheap reweighting of this cache.
struct PreparedEpisode {
  const Episode* episode = nullptr;
  PipelineOptions options;
  std::uint64_t jitter_seed = 0;
  std::vector<Eigen::VectorXd> support_spatial;
  std::vector<Eigen::VectorXd> query_spatial;
  std::vector<ClassSubspace> spatial_subspaces;
  std::vector<FeatureTensor> support_low;  // idct(mask(dct(x))), empty for V0
  std::vector<FeatureTensor> query_low;
  std::vector<Eigen::VectorXd> support_pooled;  // gap(mask(dct(x)))
  std::vector<Eigen::VectorXd> query_pooled;
};

/// `ep` must outlive the returned cache.
PreparedEpisode prepare_episode(const Episode& ep, const PipelineOptions& options,
                                std::uint64_t jitter_seed);

EpisodeResult run_prepared(const PreparedEpisode& prepared, const ModelParams& params);

/// Full forward pass over one episode: builds both views of every sample,
/// per-class subspaces from the support set, and classifies every query.
/// Jitter for class k and view v is drawn from derive_seed({jitter_seed, k, v}),
/// so the same seed reproduces the result bit for bit.
EpisodeResult evaluate_episode(const Episode& ep, const ModelParams& params,
                               const PipelineOptions& options, std::uint64_t jitter_seed);

}  // namespace fsnet
