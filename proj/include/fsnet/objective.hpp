#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsnet/episode.hpp"
#include "fsnet/error.hpp"
#include "fsnet/params.hpp"
#include "fsnet/pipeline.hpp"

namespace fsnet {

struct LossBreakdown {
  double l_cls = 0.0;
  double l_disc = 0.0;
  double lambda = 0.0;
  double l_total = 0.0;
};

/// Mean over rows of -log softmax(row)[label].
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const std::size_t> labels);

/// Sum over ordered pairs i != j of ||P_i^T P_j||_F^2.
double disc_loss(std::span<const Eigen::MatrixXd> bases);

/// disc_loss over the spatial bases plus disc_loss over the shape bases.
double disc_loss(std::span<const DualSubspace> subspaces);

LossBreakdown loss_of(const EpisodeResult& result, double lambda);

LossBreakdown total_loss(const Episode& ep, const ModelParams& params,
                         const PipelineOptions& options, double lambda,
                         std::uint64_t jitter_seed);

/// Central differences of l_total with respect to every ModelParams coordinate
/// (ModelParams::flatten order). Both evaluations of a coordinate share
/// `jitter_seed`, so the subspace jitter cancels.
std::vector<double> fd_gradient(const Episode& ep, const ModelParams& params,
                                const PipelineOptions& options, double lambda,
                                std::uint64_t jitter_seed, double h);
std::vector<double> fd_gradient(const PreparedEpisode& prepared, const ModelParams& params,
                                double lambda, double h);

struct TrainOptions {
  Phase phase = Phase::base;
  std::size_t way = 5;
  std::size_t shot = 1;
  std::size_t queries = 15;
  std::size_t steps = 60;
  double lr = 0.05;
  double lambda = 0.03;
  double fd_step = 1e-4;
  std::uint64_t seed = 0;
  PipelineOptions pipeline;

  static TrainOptions from(const Config& config);
};

struct TrainResult {
  ModelParams params;
  std::vector<LossBreakdown> trace;  // loss at the start of each step
};

/// Thrown when a training step produces a non-finite loss or one above 1e6.
class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(const std::string& what, std::vector<LossBreakdown> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<LossBreakdown>& trace() const noexcept { return trace_; }

 private:
  std::vector<LossBreakdown> trace_;
};

/// Plain gradient descent on fd_gradient. Step t samples its episode from
/// derive_seed({seed, kTrainSampling, t}) and its jitter from
/// derive_seed({seed, kTrainJitter, t}).
TrainResult train(const DatasetSplit& split, ModelParams params, const TrainOptions& options);

}  // namespace fsnet
