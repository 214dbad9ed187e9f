#include "fsnet/data_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "binary_io.hpp"
#include "fsnet/error.hpp"
#include "fsnet/rng.hpp"
#include "fsnet/spectral.hpp"

namespace fsnet {

std::vector<char> encode_fts(const FtsData& data) {
  if (data.features.size() != data.labels.size()) {
    throw ValidationError("FTS: " + std::to_string(data.features.size()) + " samples but " +
                          std::to_string(data.labels.size()) + " labels");
  }
  if (data.features.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("FTS: too many samples");
  }
  detail::ByteWriter w;
  w.raw("FTS1");
  w.u32(kFtsVersion);
  w.u32(static_cast<std::uint32_t>(data.features.size()));
  w.u32(static_cast<std::uint32_t>(data.shape.channels));
  w.u32(static_cast<std::uint32_t>(data.shape.height));
  w.u32(static_cast<std::uint32_t>(data.shape.width));
  w.u32(data.class_count);
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    const FeatureTensor& x = data.features[i];
    if (x.shape() != data.shape) {
      throw ValidationError("FTS: sample " + std::to_string(i) + " has shape " +
                            to_string(x.shape()) + ", file declares " + to_string(data.shape));
    }
    if (data.labels[i] >= data.class_count) {
      throw ValidationError("FTS: sample " + std::to_string(i) + " label " +
                            std::to_string(data.labels[i]) + " >= class count " +
                            std::to_string(data.class_count));
    }
    w.u32(data.labels[i]);
    for (double v : x.data()) {
      const float f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw ValidationError("FTS: sample " + std::to_string(i) +
                              " holds a value not representable as finite f32");
      }
      w.f32(f);
    }
  }
  return w.bytes();
}

FtsData decode_fts(std::span<const char> bytes) {
  detail::ByteReader r(bytes, "FTS");
  if (r.raw(4) != "FTS1") throw ParseError("FTS: bad magic", 0);
  const std::uint32_t version = r.u32("version");
  if (version != kFtsVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32("sample count");
  FtsData d;
  d.shape.channels = r.u32("channels");
  d.shape.height = r.u32("height");
  d.shape.width = r.u32("width");
  d.class_count = r.u32("class count");
  if (d.shape.size() == 0) r.fail("zero-sized sample shape " + to_string(d.shape));

  const std::uint64_t per_sample = 4 + 4 * static_cast<std::uint64_t>(d.shape.size());
  const std::uint64_t expected = per_sample * count;
  if (r.remaining() != expected) {
    r.fail("payload is " + std::to_string(r.remaining()) + " bytes, " + std::to_string(count) +
           " samples of " + to_string(d.shape) + " need " + std::to_string(expected));
  }

  d.features.reserve(count);
  d.labels.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t at = r.offset();
    const std::uint32_t label = r.u32("label");
    if (label >= d.class_count) {
      throw ParseError("FTS: sample " + std::to_string(i) + " label " + std::to_string(label) +
                           " >= class count " + std::to_string(d.class_count),
                       at);
    }
    std::vector<double> values(d.shape.size());
    for (auto& v : values) {
      v = r.f32("value");
      if (!std::isfinite(v)) throw ParseError("FTS: non-finite value", r.offset() - 4);
    }
    d.labels.push_back(label);
    d.features.emplace_back(d.shape, std::move(values));
  }
  return d;
}

void write_fts(const FtsData& data, const std::filesystem::path& path) {
  detail::write_file(path.string(), encode_fts(data));
}

FtsData read_fts(const std::filesystem::path& path) {
  const std::vector<char> bytes = detail::read_file(path.string());
  try {
    return decode_fts(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

void SynthSpec::validate() const {
  if (classes == 0 || samples_per_class == 0 || channels == 0 || height == 0 || width == 0) {
    throw ConfigError("synthetic: classes, samples, channels, height and width must be positive");
  }
  if (!(template_energy > 0.0) || !(pose_energy >= 0.0) || !(noise_energy >= 0.0) ||
      !std::isfinite(template_energy) || !std::isfinite(pose_energy) ||
      !std::isfinite(noise_energy)) {
    throw ConfigError("synthetic: template energy must be > 0, pose and noise energies >= 0");
  }
  if (noise_rank == 0) throw ConfigError("synthetic: noise rank must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("synthetic: tau must lie in (0, 1)");
  const auto counts = split_counts(classes);
  if (counts[0] == 0 || counts[1] == 0 || counts[2] == 0) {
    throw ConfigError("synthetic: " + std::to_string(classes) +
                      " classes leave an empty split under 50/25/25 (base=" +
                      std::to_string(counts[0]) + ", val=" + std::to_string(counts[1]) +
                      ", novel=" + std::to_string(counts[2]) + ")");
  }
  const LowPassMask mask(height, width, tau);
  if (mask.kept_count() == height * width) {
    throw ConfigError("synthetic: tau keeps every frequency, no band left for clutter");
  }
}

std::array<std::size_t, 3> split_counts(std::size_t classes) {
  const auto base = static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(classes)));
  const auto val = static_cast<std::size_t>(std::llround(0.25 * static_cast<double>(classes)));
  const std::size_t novel = classes >= base + val ? classes - base - val : 0;
  return {base, val, novel};
}

namespace {

// Random spectrum restricted to coefficients where keep(u, v) matches `inside`,
// scaled to unit energy.
Spectrum random_band(const Shape& shape, const LowPassMask& mask, bool inside, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(shape);
  for (std::size_t c = 0; c < shape.channels; ++c)
    for (std::size_t u = 0; u < shape.height; ++u)
      for (std::size_t v = 0; v < shape.width; ++v)
        if (mask.keeps(u, v) == inside) s(c, u, v) = normal(rng);
  const double norm = std::sqrt(s.energy());
  if (norm > 0.0)
    for (double& x : s.data()) x /= norm;
  return s;
}

}  // namespace

SynthDataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const Shape shape{spec.channels, spec.height, spec.width};
  const LowPassMask mask(spec.height, spec.width, spec.tau);
  const Dct2Plan plan(spec.height, spec.width);
  const double passband = static_cast<double>(mask.kept_count() * spec.channels);
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Spectrum> clutter;
  for (std::size_t j = 0; j < spec.noise_rank; ++j) {
    clutter.push_back(random_band(shape, mask, false, rng));
  }
  std::vector<Spectrum> templates;
  for (std::size_t k = 0; k < spec.classes; ++k) {
    Spectrum t = random_band(shape, mask, true, rng);
    for (double& x : t.data()) x *= std::sqrt(spec.template_energy);
    templates.push_back(std::move(t));
  }

  const double pose_sd = std::sqrt(spec.pose_energy / passband);
  const double clutter_sd = std::sqrt(spec.noise_energy / static_cast<double>(spec.noise_rank));
  const auto counts = split_counts(spec.classes);

  SynthDataset out;
  for (FtsData* d : {&out.base, &out.val, &out.novel}) {
    d->shape = shape;
    d->class_count = static_cast<std::uint32_t>(spec.classes);
  }

  for (std::size_t k = 0; k < spec.classes; ++k) {
    FtsData& dst = k < counts[0] ? out.base : (k < counts[0] + counts[1] ? out.val : out.novel);
    for (std::size_t n = 0; n < spec.samples_per_class; ++n) {
      Spectrum s = templates[k];
      for (std::size_t c = 0; c < shape.channels; ++c)
        for (std::size_t u = 0; u < shape.height; ++u)
          for (std::size_t v = 0; v < shape.width; ++v)
            if (mask.keeps(u, v)) s(c, u, v) += pose_sd * normal(rng);
      for (const Spectrum& pattern : clutter) {
        const double g = clutter_sd * normal(rng);
        auto dst_data = s.data();
        const auto src = pattern.data();
        for (std::size_t i = 0; i < dst_data.size(); ++i) dst_data[i] += g * src[i];
      }
      FeatureTensor x = plan.inverse(s);
      for (double& v : x.data()) v = static_cast<double>(static_cast<float>(v));
      dst.features.push_back(std::move(x));
      dst.labels.push_back(static_cast<std::uint32_t>(k));
    }
  }

  append_to_split(out.split, out.base, Phase::base);
  append_to_split(out.split, out.val, Phase::val);
  append_to_split(out.split, out.novel, Phase::novel);
  return out;
}

void append_to_split(DatasetSplit& split, const FtsData& data, Phase phase) {
  std::vector<std::size_t> labels(data.labels.begin(), data.labels.end());
  split.add(data.features, std::move(labels), phase);
}

void write_synthetic(const SynthDataset& data, const SynthSpec& spec,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_fts(data.base, dir / "base.fts");
  write_fts(data.val, dir / "val.fts");
  write_fts(data.novel, dir / "novel.fts");

  std::ofstream m(dir / "manifest.txt", std::ios::trunc);
  if (!m) throw ValidationError("cannot write manifest in " + dir.string());
  m << "format=FTS1\n"
    << "classes=" << spec.classes << '\n'
    << "samples_per_class=" << spec.samples_per_class << '\n'
    << "shape=" << spec.channels << 'x' << spec.height << 'x' << spec.width << '\n'
    << "template_energy=" << format_real(spec.template_energy) << '\n'
    << "pose_energy=" << format_real(spec.pose_energy) << '\n'
    << "noise_energy=" << format_real(spec.noise_energy) << '\n'
    << "noise_rank=" << spec.noise_rank << '\n'
    << "tau=" << format_real(spec.tau) << '\n'
    << "seed=" << spec.seed << '\n';
  const auto counts = split_counts(spec.classes);
  for (std::size_t k = 0; k < spec.classes; ++k) {
    const char* phase = k < counts[0] ? "base" : (k < counts[0] + counts[1] ? "val" : "novel");
    m << "class." << k << '=' << phase << '\n';
  }
}

DatasetSplit load_split(const std::filesystem::path& path, Phase single_file_phase) {
  DatasetSplit split;
  if (std::filesystem::is_directory(path)) {
    append_to_split(split, read_fts(path / "base.fts"), Phase::base);
    append_to_split(split, read_fts(path / "val.fts"), Phase::val);
    append_to_split(split, read_fts(path / "novel.fts"), Phase::novel);
  } else {
    append_to_split(split, read_fts(path), single_file_phase);
  }
  return split;
}

}  // namespace fsnet
