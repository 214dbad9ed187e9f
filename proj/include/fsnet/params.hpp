#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fsnet/attention.hpp"
#include "fsnet/subspace.hpp"

namespace fsnet {

/// All learnable state: channel attention, fusion logits and the logit scale.
struct ModelParams {
  AttentionParams attention;
  FusionParams fusion;
  double logit_scale = 1.0;

  static ModelParams initial(std::size_t channels, std::size_t reduction, double logit_scale,
                             std::uint64_t seed);

  /// Number of scalar parameters.
  std::size_t size() const noexcept;

  /// Flat view in serialization order: W1 (row-major), b1, W2 (row-major), b2,
  /// fusion logits (spatial, shape), logit scale.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  /// Human-readable name of a flat coordinate, e.g. "attention.w1[0,3]".
  std::string coordinate_name(std::size_t index) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// FSMP binary layout, little-endian:
///   "FSMP" | version u32 | channels u32 | reduction u32 | hidden u32 | count u32 |
///   count x f64 in ModelParams::flatten() order.
inline constexpr std::uint32_t kParamsVersion = 1;

std::vector<char> encode_params(const ModelParams& p);
ModelParams decode_params(std::span<const char> bytes);

void write_params(const ModelParams& p, const std::filesystem::path& path);
ModelParams read_params(const std::filesystem::path& path);

}  // namespace fsnet
