#include "fsnet/evaluate.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fsnet/error.hpp"
#include "fsnet/parallel.hpp"
#include "fsnet/rng.hpp"

namespace fsnet {

EvalReport summarize(std::vector<double> accuracies) {
  if (accuracies.size() < 2) throw ValidationError("summarize: need at least 2 episodes");
  EvalReport r;
  r.episodes = accuracies.size();
  const double n = static_cast<double>(r.episodes);
  const double mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : accuracies) ss += (a - mean) * (a - mean);
  r.mean_accuracy = mean;
  r.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  r.accuracies = std::move(accuracies);
  return r;
}

EvalOptions EvalOptions::from(const Config& config) {
  EvalOptions o;
  o.phase = config.phase;
  o.way = config.way;
  o.shot = config.shot;
  o.queries = config.query;
  o.episodes = config.episodes;
  o.seed = config.seed;
  o.pipeline = PipelineOptions::from(config);
  return o;
}

std::vector<EpisodeResult> evaluate_detailed(const DatasetSplit& split, const ModelParams& params,
                                             const EvalOptions& o) {
  if (o.episodes < 2) throw ConfigError("evaluate: episodes must be >= 2");
  std::vector<EpisodeResult> results(o.episodes);
  parallel_for(o.episodes, [&](std::size_t i) {
    Rng rng(derive_seed({o.seed, stream::kEpisodeSampling, i}));
    const Episode ep = sample_episode(split, o.phase, o.way, o.shot, o.queries, rng);
    results[i] = evaluate_episode(ep, params, o.pipeline,
                                  derive_seed({o.seed, stream::kSubspaceJitter, i}));
    results[i].subspaces.clear();
  });
  return results;
}

EvalReport evaluate(const DatasetSplit& split, const ModelParams& params, const EvalOptions& o) {
  const std::vector<EpisodeResult> results = evaluate_detailed(split, params, o);
  std::vector<double> acc;
  acc.reserve(results.size());
  for (const auto& r : results) acc.push_back(r.accuracy);
  return summarize(std::move(acc));
}

std::vector<std::pair<Variant, EvalReport>> ablate(const DatasetSplit& split,
                                                   const ModelParams& params,
                                                   const EvalOptions& o) {
  std::vector<std::pair<Variant, EvalReport>> table;
  for (Variant v : {Variant::v0, Variant::v1, Variant::v2, Variant::v3}) {
    EvalOptions ov = o;
    ov.pipeline.variant = v;
    table.emplace_back(v, evaluate(split, params, ov));
  }
  return table;
}

void write_report(std::ostream& out, const EvalReport& r, std::string_view prefix) {
  out << prefix << "episodes=" << r.episodes << '\n'
      << prefix << "mean_accuracy=" << format_real(r.mean_accuracy) << '\n'
      << prefix << "ci95=" << format_real(r.ci95) << '\n';
}

void write_accuracy_csv(std::ostream& out, const EvalReport& r) {
  out << "episode,accuracy\n";
  for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
    out << i << ',' << format_real(r.accuracies[i]) << '\n';
  }
}

}  // namespace fsnet
