#include "fsnet/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsnet/parallel.hpp"
#include "fsnet/rng.hpp"

namespace fsnet {

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const std::size_t> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw ValidationError("cross_entropy: " + std::to_string(logits.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ValidationError("cross_entropy: no queries");
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const std::size_t y = labels[static_cast<std::size_t>(i)];
    if (y >= static_cast<std::size_t>(logits.cols())) {
      throw ValidationError("cross_entropy: label " + std::to_string(y) + " outside [0, " +
                            std::to_string(logits.cols()) + ")");
    }
    const auto row = logits.row(i);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    total += lse - row(static_cast<Eigen::Index>(y));
  }
  return std::max(0.0, total / static_cast<double>(logits.rows()));
}

double disc_loss(std::span<const Eigen::MatrixXd> bases) {
  double total = 0.0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    for (std::size_t j = i + 1; j < bases.size(); ++j) {
      if (bases[i].rows() != bases[j].rows()) {
        throw ValidationError("disc_loss: basis " + std::to_string(i) + " has dimension " +
                              std::to_string(bases[i].rows()) + ", basis " + std::to_string(j) +
                              " has " + std::to_string(bases[j].rows()));
      }
      if (bases[i].cols() == 0 || bases[j].cols() == 0) continue;
      total += 2.0 * (bases[i].transpose() * bases[j]).squaredNorm();
    }
  }
  return total;
}

double disc_loss(std::span<const DualSubspace> subspaces) {
  std::vector<Eigen::MatrixXd> spatial;
  std::vector<Eigen::MatrixXd> shape;
  for (const auto& s : subspaces) {
    spatial.push_back(s.spatial.basis);
    if (s.shape) shape.push_back(s.shape->basis);
  }
  return disc_loss(spatial) + disc_loss(shape);
}

LossBreakdown loss_of(const EpisodeResult& r, double lambda) {
  LossBreakdown b;
  b.lambda = lambda;
  b.l_cls = cross_entropy(r.logits, r.labels);
  b.l_disc = disc_loss(r.subspaces);
  b.l_total = b.l_cls + lambda * b.l_disc;
  return b;
}

LossBreakdown total_loss(const Episode& ep, const ModelParams& params,
                         const PipelineOptions& options, double lambda,
                         std::uint64_t jitter_seed) {
  return loss_of(evaluate_episode(ep, params, options, jitter_seed), lambda);
}

std::vector<double> fd_gradient(const PreparedEpisode& prepared, const ModelParams& params,
                                double lambda, double h) {
  if (!(h > 0.0)) throw ValidationError("fd_gradient: step must be > 0");
  const std::vector<double> theta = params.flatten();
  std::vector<double> grad(theta.size(), 0.0);

  parallel_for(theta.size(), [&](std::size_t i) {
    ModelParams probe = params;
    std::vector<double> shifted = theta;

    shifted[i] = theta[i] + h;
    probe.assign(shifted);
    const double up = loss_of(run_prepared(prepared, probe), lambda).l_total;

    shifted[i] = theta[i] - h;
    probe.assign(shifted);
    const double down = loss_of(run_prepared(prepared, probe), lambda).l_total;

    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError("fd_gradient: non-finite loss when perturbing " +
                           params.coordinate_name(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  });
  return grad;
}

std::vector<double> fd_gradient(const Episode& ep, const ModelParams& params,
                                const PipelineOptions& options, double lambda,
                                std::uint64_t jitter_seed, double h) {
  return fd_gradient(prepare_episode(ep, options, jitter_seed), params, lambda, h);
}

TrainOptions TrainOptions::from(const Config& config) {
  TrainOptions t;
  t.phase = config.phase;
  t.way = config.way;
  t.shot = config.shot;
  t.queries = config.query;
  t.steps = config.steps;
  t.lr = config.lr;
  t.lambda = config.lambda;
  t.fd_step = config.fd_step;
  t.seed = config.seed;
  t.pipeline = PipelineOptions::from(config);
  return t;
}

TrainResult train(const DatasetSplit& split, ModelParams params, const TrainOptions& o) {
  if (!(o.lr >= 0.0)) throw ValidationError("train: learning rate must be >= 0");
  TrainResult result;
  result.trace.reserve(o.steps);

  for (std::size_t step = 0; step < o.steps; ++step) {
    Rng rng(derive_seed({o.seed, stream::kTrainSampling, step}));
    const Episode ep = sample_episode(split, o.phase, o.way, o.shot, o.queries, rng);
    const std::uint64_t jitter = derive_seed({o.seed, stream::kTrainJitter, step});

    const PreparedEpisode prepared = prepare_episode(ep, o.pipeline, jitter);
    const LossBreakdown loss = loss_of(run_prepared(prepared, params), o.lambda);
    result.trace.push_back(loss);
    if (!std::isfinite(loss.l_total) || loss.l_total > 1e6) {
      throw TrainingDiverged("train: loss diverged at step " + std::to_string(step) + " (" +
                                 std::to_string(loss.l_total) + ")",
                             result.trace);
    }

    const std::vector<double> grad = fd_gradient(prepared, params, o.lambda, o.fd_step);
    std::vector<double> theta = params.flatten();
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= o.lr * grad[i];
    params.assign(theta);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace fsnet
