#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fsnet/config.hpp"
#include "fsnet/episode.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

/// Contents of one FTS file. FTS1 layout, little-endian:
///   "FTS1" | version u32 | sample count u32 | C u32 | H u32 | W u32 | class count u32 |
///   per sample: label u32, then C*H*W f32 in (channel, row, column) order.
struct FtsData {
  Shape shape{1, 1, 1};
  std::uint32_t class_count = 0;
  std::vector<FeatureTensor> features;
  std::vector<std::uint32_t> labels;

  friend bool operator==(const FtsData&, const FtsData&) = default;
};

inline constexpr std::uint32_t kFtsVersion = 1;

std::vector<char> encode_fts(const FtsData& data);
FtsData decode_fts(std::span<const char> bytes);

void write_fts(const FtsData& data, const std::filesystem::path& path);
FtsData read_fts(const std::filesystem::path& path);

/// Parameters of the synthetic benchmark. Each class owns a random spectral
/// template confined to the low-pass band of `tau`; each sample adds an in-band
/// pose perturbation and out-of-band clutter drawn from a small bank of
/// high-frequency patterns shared by every class. Energies are expected squared
/// norms per sample (the template energy is exact).
struct SynthSpec {
  std::size_t classes = 40;
  std::size_t samples_per_class = 30;
  std::size_t channels = 16;
  std::size_t height = 8;
  std::size_t width = 8;
  double template_energy = 1.0;
  double pose_energy = 0.1;
  double noise_energy = 3.0;
  std::size_t noise_rank = 4;
  double tau = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class counts (base, val, novel) for a 50/25/25 split, rounded half away from zero
/// for base and val; novel takes the remainder.
std::array<std::size_t, 3> split_counts(std::size_t classes);

struct SynthDataset {
  FtsData base;
  FtsData val;
  FtsData novel;
  DatasetSplit split;
};

/// Deterministic in `spec`. Classes [0, b) are base, [b, b+v) val, the rest novel.
/// Values are rounded to f32 so the in-memory set equals its FTS round trip.
SynthDataset generate_synthetic(const SynthSpec& spec);

/// Writes base.fts, val.fts, novel.fts and manifest.txt into `dir`.
void write_synthetic(const SynthDataset& data, const SynthSpec& spec,
                     const std::filesystem::path& dir);

/// Loads a dataset. A directory must hold base.fts, val.fts and novel.fts; a
/// single file is assigned wholesale to `single_file_phase`.
DatasetSplit load_split(const std::filesystem::path& path, Phase single_file_phase);

void append_to_split(DatasetSplit& split, const FtsData& data, Phase phase);

}  // namespace fsnet
