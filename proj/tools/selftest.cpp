#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "commands.hpp"
#include "fsnet/data_io.hpp"
#include "fsnet/objective.hpp"
#include "fsnet/oracles.hpp"
#include "fsnet/params.hpp"
#include "fsnet/spectral.hpp"

namespace fsnet::cli {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", x);
  return buf;
}

FeatureTensor random_tensor(const Shape& s, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureTensor x(s);
  for (double& v : x.data()) v = normal(rng);
  return x;
}

CheckResult check_dct_oracle() {
  Rng rng(11);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const Shape s{1 + rng() % 3, 1 + rng() % 7, 1 + rng() % 7};
    const FeatureTensor x = random_tensor(s, rng);
    const Spectrum fast = dct2(x);
    const Spectrum slow = oracle::naive_dct2(x);
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst = std::max(worst, std::abs(fast.data()[i] - slow.data()[i]));
    }
  }
  return {"dct-oracle", worst <= 1e-9, "max abs error " + sci(worst)};
}

CheckResult check_dct_round_trip() {
  Rng rng(12);
  double worst_inverse = 0.0;
  double worst_parseval = 0.0;
  for (int t = 0; t < 30; ++t) {
    const Shape s{1 + rng() % 4, 1 + rng() % 8, 1 + rng() % 8};
    const FeatureTensor x = random_tensor(s, rng);
    const Spectrum f = dct2(x);
    const FeatureTensor back = idct2(f);
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst_inverse = std::max(worst_inverse, std::abs(back.data()[i] - x.data()[i]));
    }
    worst_parseval = std::max(worst_parseval, std::abs(f.energy() - x.energy()) / x.energy());
  }
  return {"dct-round-trip", worst_inverse <= 1e-9 && worst_parseval <= 1e-9,
          "inverse " + sci(worst_inverse) + ", parseval " + sci(worst_parseval)};
}

CheckResult check_mask() {
  struct Case {
    std::size_t h, w;
    std::uint64_t num, den;
  };
  const Case cases[] = {{10, 10, 3, 10}, {2, 2, 3, 10}, {16, 16, 1, 2}, {8, 8, 3, 10}, {7, 5, 2, 5}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    const double tau = static_cast<double>(c.num) / static_cast<double>(c.den);
    const LowPassMask mask(c.h, c.w, tau);
    const auto expected = oracle::mask_by_enumeration(c.h, c.w, c.num, c.den);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (std::size_t u = 0; u < c.h; ++u) {
      for (std::size_t v = 0; v < c.w; ++v) {
        if (mask.keeps(u, v)) got.emplace_back(u, v);
      }
    }
    if (got != expected) {
      ok = false;
      detail += std::to_string(c.h) + "x" + std::to_string(c.w) + " tau " + format_real(tau) +
                ": kept " + std::to_string(got.size()) + ", expected " +
                std::to_string(expected.size()) + "; ";
    }
  }
  return {"mask-enumeration", ok, ok ? "5 grids match" : detail};
}

CheckResult check_projector() {
  Rng rng(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_dist = 0.0;
  double worst_idem = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng() % 8;
    const std::size_t k = 1 + rng() % 5;
    std::vector<Eigen::VectorXd> support;
    for (std::size_t i = 0; i < k; ++i) {
      support.push_back(Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(d),
                                                     [&] { return normal(rng); }));
    }
    Rng jitter(rng());
    const ClassSubspace sub = build_subspace(support, 5, 1e-5, jitter, View::spatial, "selftest");
    const Eigen::VectorXd q =
        Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(d), [&] { return normal(rng); });
    const double fast = projection_distance(q, sub);
    const double slow = oracle::explicit_residual_distance(q, sub.mean, sub.basis);
    worst_dist = std::max(worst_dist, std::abs(fast - slow));
    worst_idem = std::max(worst_idem, oracle::projector_idempotence_error(sub.basis));
  }
  return {"projector-oracle", worst_dist <= 1e-9 && worst_idem <= 1e-8,
          "distance " + sci(worst_dist) + ", idempotence " + sci(worst_idem)};
}

CheckResult check_fusion_gradient() {
  SynthSpec spec;
  spec.classes = 12;
  spec.samples_per_class = 8;
  spec.channels = 8;
  spec.height = 6;
  spec.width = 6;
  spec.seed = 5;
  const SynthDataset data = generate_synthetic(spec);
  ModelParams params = ModelParams::initial(8, 4, 2.0, 3);
  params.fusion.logits = {0.7, 1.4};
  PipelineOptions po;
  po.variant = Variant::v3;
  double worst = 0.0;
  for (std::uint64_t e = 0; e < 3; ++e) {
    Rng rng(derive_seed({17, e}));
    const Episode ep = sample_episode(data.split, Phase::base, 5, 2, 3, rng);
    const std::uint64_t jitter = derive_seed({18, e});
    const PreparedEpisode prepared = prepare_episode(ep, po, jitter);
    const auto fd = fd_gradient(prepared, params, 0.03, 1e-4);
    const auto analytic = oracle::analytic_fusion_gradient(run_prepared(prepared, params),
                                                           params.fusion, params.logit_scale);
    const std::size_t base = params.size() - 3;  // fusion logits precede the scale
    for (std::size_t j = 0; j < 2; ++j) {
      const double rel = std::abs(fd[base + j] - analytic[j]) / std::max(std::abs(analytic[j]), 1e-6);
      worst = std::max(worst, rel);
    }
  }
  return {"fusion-gradient", worst <= 1e-4, "max relative error " + sci(worst)};
}

CheckResult check_fts_round_trip() {
  SynthSpec spec;
  spec.classes = 4;
  spec.samples_per_class = 3;
  spec.channels = 2;
  spec.height = 4;
  spec.width = 4;
  spec.noise_rank = 2;
  const SynthDataset data = generate_synthetic(spec);
  const FtsData back = decode_fts(encode_fts(data.base));
  FtsData empty;
  empty.shape = Shape{3, 2, 2};
  const bool ok = back == data.base && decode_fts(encode_fts(empty)) == empty;
  return {"fts-round-trip", ok, ok ? "bit-exact" : "decoded data differs"};
}

CheckResult check_params_round_trip() {
  ModelParams p = ModelParams::initial(12, 4, 1.5, 99);
  p.fusion.logits = {-0.25, 3.0};
  const bool ok = decode_params(encode_params(p)) == p;
  return {"params-round-trip", ok, ok ? std::to_string(p.size()) + " values bit-exact"
                                      : "decoded params differ"};
}

}  // namespace

std::vector<CheckResult> run_selftest() {
  using Check = CheckResult (*)();
  const Check checks[] = {check_dct_oracle,      check_dct_round_trip, check_mask,
                          check_projector,       check_fusion_gradient, check_fts_round_trip,
                          check_params_round_trip};
  std::vector<CheckResult> results;
  for (Check c : checks) {
    try {
      results.push_back(c());
    } catch (const std::exception& e) {
      results.push_back({"exception", false, e.what()});
    }
  }
  return results;
}

}  // namespace fsnet::cli
