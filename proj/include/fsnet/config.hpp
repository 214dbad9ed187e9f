#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsnet/subspace.hpp"

namespace fsnet {

/// Ablation variants.
///  v0: spatial subspace only (single-view baseline)
///  v1: + low-pass frequency view, fixed 1:1 fusion, attention bypassed
///  v2: + channel attention on the frequency view, fixed 1:1 fusion
///  v3: + learned softmax fusion weights
enum class Variant { v0 = 0, v1 = 1, v2 = 2, v3 = 3 };

enum class SpatialPool { none, gap };

enum class Phase { base, val, novel };

std::string_view to_string(Variant v);
std::string_view describe(Variant v);
std::string_view to_string(SpatialPool p);
std::string_view to_string(Phase p);
std::string_view to_string(FusionSpace s);

std::optional<Variant> parse_variant(std::string_view text);
std::optional<Phase> parse_phase(std::string_view text);

/// Every tunable of the pipeline, evaluation protocol and trainer.
struct Config {
  std::size_t way = 5;
  std::size_t shot = 5;
  std::size_t query = 15;
  std::size_t episodes = 600;
  double tau = 0.3;
  double lambda = 0.03;
  double jitter = 1e-5;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
  FusionSpace fusion_space = FusionSpace::similarity;
  SpatialPool spatial_pool = SpatialPool::none;
  Variant variant = Variant::v3;
  std::size_t d_max = 5;
  std::size_t reduction = 4;
  double logit_scale = 1.0;
  double lr = 0.05;
  std::size_t steps = 60;
  double fd_step = 1e-4;
  Phase phase = Phase::novel;

  /// Sets one key from text and re-validates that key. Keys use the CLI flag
  /// names; '_' and '-' are interchangeable. Throws ConfigError with the legal
  /// range on bad input or unknown keys.
  void set(std::string_view key, std::string_view value);

  /// Applies a flat key=value file. Blank lines and lines starting with '#' are
  /// skipped.
  void merge_file(const std::filesystem::path& path);

  /// Every key with its resolved value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static const std::vector<std::string>& keys();
};

/// Canonical text for a double in reports and configs (shortest round-trip form).
std::string format_real(double x);

}  // namespace fsnet
