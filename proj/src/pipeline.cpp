#include "fsnet/pipeline.hpp"

#include <cmath>
#include <string>

#include "fsnet/attention.hpp"
#include "fsnet/error.hpp"
#include "fsnet/spectral.hpp"

namespace fsnet {

PipelineOptions PipelineOptions::from(const Config& config) {
  PipelineOptions o;
  o.variant = config.variant;
  o.tau = config.tau;
  o.epsilon = config.epsilon;
  o.jitter = config.jitter;
  o.d_max = config.d_max;
  o.fusion_space = config.fusion_space;
  o.spatial_pool = config.spatial_pool;
  return o;
}

namespace {

Eigen::VectorXd to_vector(const FeatureTensor& x, SpatialPool pool) {
  if (pool == SpatialPool::none) return flatten(x);
  const Shape& s = x.shape();
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.channels));
  for (std::size_t c = 0; c < s.channels; ++c) {
    double sum = 0.0;
    for (double v : x.channel(c)) sum += v;
    out(static_cast<Eigen::Index>(c)) = sum / static_cast<double>(s.plane());
  }
  return out;
}

// Shape view of one sample: channel c of the low-pass reconstruction scaled by
// gains(c). Equal to idct(reweight(mask(dct(x)), gains)) because the inverse
// transform acts on each channel independently and linearly.
Eigen::VectorXd shape_vector(const FeatureTensor& low, const Eigen::VectorXd* gains,
                             SpatialPool pool) {
  if (gains == nullptr) return to_vector(low, pool);
  FeatureTensor scaled = low;
  for (std::size_t c = 0; c < low.shape().channels; ++c) {
    const double g = (*gains)(static_cast<Eigen::Index>(c));
    for (double& v : scaled.channel(c)) v *= g;
  }
  return to_vector(scaled, pool);
}

std::string class_context(const Episode& ep, std::size_t k, View view) {
  return "class " + std::to_string(k) + " (global " + std::to_string(ep.classes[k]) + ") view " +
         std::string(to_string(view));
}

}  // namespace

PreparedEpisode prepare_episode(const Episode& ep, const PipelineOptions& o,
                                std::uint64_t jitter_seed) {
  ep.validate();
  PreparedEpisode p;
  p.episode = &ep;
  p.options = o;
  p.jitter_seed = jitter_seed;

  for (const auto& x : ep.support) p.support_spatial.push_back(to_vector(x, o.spatial_pool));
  for (const auto& x : ep.query) p.query_spatial.push_back(to_vector(x, o.spatial_pool));

  for (std::size_t k = 0; k < ep.way; ++k) {
    const auto first = p.support_spatial.begin() + static_cast<std::ptrdiff_t>(k * ep.shot);
    const std::vector<Eigen::VectorXd> s(first, first + static_cast<std::ptrdiff_t>(ep.shot));
    Rng rng(derive_seed({jitter_seed, k, static_cast<std::uint64_t>(View::spatial)}));
    p.spatial_subspaces.push_back(build_subspace(s, o.d_max, o.jitter, rng, View::spatial,
                                                 class_context(ep, k, View::spatial)));
  }
  if (o.variant == Variant::v0) return p;

  const Shape& shape = ep.support.front().shape();
  const Dct2Plan plan(shape.height, shape.width);
  const LowPassMask mask(shape.height, shape.width, o.tau);
  const auto lower = [&](const std::vector<FeatureTensor>& xs, std::vector<FeatureTensor>& low,
                         std::vector<Eigen::VectorXd>& pooled) {
    for (const auto& x : xs) {
      const Spectrum f = apply_mask(plan.forward(x), mask);
      pooled.push_back(gap(f));
      low.push_back(plan.inverse(f));
    }
  };
  lower(ep.support, p.support_low, p.support_pooled);
  lower(ep.query, p.query_low, p.query_pooled);
  return p;
}

EpisodeResult run_prepared(const PreparedEpisode& p, const ModelParams& params) {
  const Episode& ep = *p.episode;
  const PipelineOptions& o = p.options;
  const bool dual = o.variant != Variant::v0;
  const bool attend = o.variant == Variant::v2 || o.variant == Variant::v3;
  const Shape& shape = ep.support.front().shape();
  if (attend && params.attention.channels != shape.channels) {
    throw ValidationError("model parameters expect " + std::to_string(params.attention.channels) +
                          " channels, features have " + std::to_string(shape.channels));
  }
  if (!std::isfinite(params.logit_scale)) throw ValidationError("logit scale is not finite");

  EpisodeResult r;
  r.classes = ep.classes;
  r.subspaces.resize(ep.way);
  for (std::size_t k = 0; k < ep.way; ++k) r.subspaces[k].spatial = p.spatial_subspaces[k];

  std::vector<Eigen::VectorXd> query_shape;
  if (dual) {
    const auto shape_of = [&](const FeatureTensor& low, const Eigen::VectorXd& pooled) {
      if (!attend) return shape_vector(low, nullptr, o.spatial_pool);
      const Eigen::VectorXd gains = attention_weights(pooled, params.attention);
      return shape_vector(low, &gains, o.spatial_pool);
    };
    std::vector<Eigen::VectorXd> support_shape;
    for (std::size_t i = 0; i < p.support_low.size(); ++i)
      support_shape.push_back(shape_of(p.support_low[i], p.support_pooled[i]));
    for (std::size_t i = 0; i < p.query_low.size(); ++i)
      query_shape.push_back(shape_of(p.query_low[i], p.query_pooled[i]));

    for (std::size_t k = 0; k < ep.way; ++k) {
      const auto first = support_shape.begin() + static_cast<std::ptrdiff_t>(k * ep.shot);
      const std::vector<Eigen::VectorXd> s(first, first + static_cast<std::ptrdiff_t>(ep.shot));
      Rng rng(derive_seed({p.jitter_seed, k, static_cast<std::uint64_t>(View::shape)}));
      r.subspaces[k].shape = build_subspace(s, o.d_max, o.jitter, rng, View::shape,
                                            class_context(ep, k, View::shape));
    }
  }

  FusionParams fusion;  // 1:1 for V1/V2
  if (o.variant == Variant::v3) fusion = params.fusion;
  r.alpha = dual ? fusion.alpha() : std::array<double, 2>{1.0, 0.0};

  const std::size_t nq = ep.query.size();
  r.logits.resize(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(ep.way));
  r.distances.reserve(nq * ep.way);
  r.labels = ep.query_labels;
  for (std::size_t i = 0; i < nq; ++i) {
    const Classification c =
        dual ? classify_query(p.query_spatial[i], query_shape[i], r.subspaces, fusion,
                              params.logit_scale, o.epsilon, o.fusion_space)
             : classify_query_spatial(p.query_spatial[i], r.subspaces, params.logit_scale,
                                      o.epsilon, o.fusion_space);
    r.logits.row(static_cast<Eigen::Index>(i)) = c.logits.transpose();
    r.distances.insert(r.distances.end(), c.distances.begin(), c.distances.end());
    r.predicted.push_back(c.predicted);
    if (c.predicted == ep.query_labels[i]) ++r.correct;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(nq);
  return r;
}

EpisodeResult evaluate_episode(const Episode& ep, const ModelParams& params,
                               const PipelineOptions& o, std::uint64_t jitter_seed) {
  return run_prepared(prepare_episode(ep, o, jitter_seed), params);
}

}  // namespace fsnet
