#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "fsnet/config.hpp"
#include "fsnet/episode.hpp"
#include "fsnet/params.hpp"
#include "fsnet/pipeline.hpp"

namespace fsnet {

struct EvalReport {
  std::size_t episodes = 0;
  double mean_accuracy = 0.0;
  double ci95 = 0.0;  // 1.96 * sample stdev / sqrt(episodes)
  std::vector<double> accuracies;
};

/// Mean and 95% confidence half-width of per-episode accuracies (needs >= 2).
EvalReport summarize(std::vector<double> accuracies);

struct EvalOptions {
  Phase phase = Phase::novel;
  std::size_t way = 5;
  std::size_t shot = 5;
  std::size_t queries = 15;
  std::size_t episodes = 600;
  std::uint64_t seed = 0;
  PipelineOptions pipeline;

  static EvalOptions from(const Config& config);
};

/// Episode i is sampled from derive_seed({seed, kEpisodeSampling, i}) and
/// jittered with derive_seed({seed, kSubspaceJitter, i}), so the report does not
/// depend on evaluation order or thread count.
EvalReport evaluate(const DatasetSplit& split, const ModelParams& params, const EvalOptions& o);

/// Per-episode predictions for the same stream `evaluate` draws; used when
/// results must be compared query by query.
std::vector<EpisodeResult> evaluate_detailed(const DatasetSplit& split, const ModelParams& params,
                                             const EvalOptions& o);

/// Evaluates V0..V3 on identical episode streams. The variant in `o.pipeline`
/// is ignored.
std::vector<std::pair<Variant, EvalReport>> ablate(const DatasetSplit& split,
                                                   const ModelParams& params,
                                                   const EvalOptions& o);

/// "key=value" lines for a report, prefixed with `prefix`.
void write_report(std::ostream& out, const EvalReport& r, std::string_view prefix);

/// CSV of per-episode accuracies: header "episode,accuracy".
void write_accuracy_csv(std::ostream& out, const EvalReport& r);

}  // namespace fsnet
