#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "commands.hpp"
#include "fsnet/episode.hpp"
#include "fsnet/params.hpp"
#include "fsnet/pipeline.hpp"
#include "fsnet/rng.hpp"

namespace fsnet::cli {

std::size_t estimate_peak_bytes(const Shape& shape, std::size_t way, std::size_t shot,
                                std::size_t queries, std::size_t d_max, Variant variant) {
  const std::size_t d = shape.size();
  const std::size_t n = way * (shot + queries);
  const std::size_t rank = std::min(shot, d_max);
  // Per class while a subspace is built: centered support, thin U, basis, mean.
  const std::size_t per_view = way * d * (2 * shot + rank + 1);
  // Episode tensors plus the flattened spatial view.
  std::size_t doubles = 2 * n * d + per_view;
  if (variant != Variant::v0) {
    // Low-pass reconstructions, the reweighted shape vectors, one transform's
    // scratch spectrum, and the second set of subspaces.
    doubles += 2 * n * d + 2 * d + per_view;
  }
  return doubles * sizeof(double);
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
  std::vector<BenchRow> rows;
  for (const Shape& shape : o.scales) {
    // Gaussian features: timing does not depend on content.
    DatasetSplit split;
    Rng data_rng(derive_seed({o.seed, shape.channels, shape.height, shape.width}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<FeatureTensor> features;
    std::vector<std::size_t> labels;
    for (std::size_t k = 0; k < o.way; ++k) {
      for (std::size_t i = 0; i < o.shot + o.queries; ++i) {
        FeatureTensor x(shape);
        for (double& v : x.data()) v = normal(data_rng);
        features.push_back(std::move(x));
        labels.push_back(k);
      }
    }
    split.add(std::move(features), std::move(labels), Phase::novel);
    const ModelParams params = ModelParams::initial(shape.channels, 4, 1.0, o.seed);

    for (Variant v : {Variant::v0, Variant::v3}) {
      PipelineOptions po;
      po.variant = v;
      std::vector<double> ms;
      double sink = 0.0;
      for (std::size_t t = 0; t < o.warmup + o.tasks; ++t) {
        Rng rng(derive_seed({o.seed, stream::kEpisodeSampling, t}));
        const Episode ep = sample_episode(split, Phase::novel, o.way, o.shot, o.queries, rng);
        const auto start = std::chrono::steady_clock::now();
        const EpisodeResult r =
            evaluate_episode(ep, params, po, derive_seed({o.seed, stream::kSubspaceJitter, t}));
        const auto stop = std::chrono::steady_clock::now();
        sink += r.accuracy;
        if (t >= o.warmup) ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      }
      BenchRow row;
      row.shape = shape;
      row.variant = v;
      row.params = v == Variant::v0 ? 1 : params.size();
      row.tasks = ms.size();
      const double mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
      double ss = 0.0;
      for (double x : ms) ss += (x - mean) * (x - mean);
      row.stdev_ms = ms.size() > 1 ? std::sqrt(ss / static_cast<double>(ms.size() - 1)) : 0.0;
      std::sort(ms.begin(), ms.end());
      const std::size_t mid = ms.size() / 2;
      row.median_ms = ms.size() % 2 == 1 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
      row.peak_bytes = estimate_peak_bytes(shape, o.way, o.shot, o.queries, po.d_max, v);
      if (!std::isfinite(sink)) row.median_ms = NAN;  // keeps the work observable
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace fsnet::cli
