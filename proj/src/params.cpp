#include "fsnet/params.hpp"

#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "fsnet/error.hpp"

namespace fsnet {

namespace detail {

std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path + " for reading");
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace detail

ModelParams ModelParams::initial(std::size_t channels, std::size_t reduction, double logit_scale,
                                 std::uint64_t seed) {
  ModelParams p;
  p.attention = AttentionParams::initial(channels, reduction, seed);
  p.logit_scale = logit_scale;
  return p;
}

std::size_t ModelParams::size() const noexcept {
  return static_cast<std::size_t>(attention.w1.size() + attention.b1.size() +
                                  attention.w2.size() + attention.b2.size()) +
         3;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (Eigen::Index i = 0; i < attention.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < attention.w1.cols(); ++j) flat.push_back(attention.w1(i, j));
  for (Eigen::Index i = 0; i < attention.b1.size(); ++i) flat.push_back(attention.b1(i));
  for (Eigen::Index i = 0; i < attention.w2.rows(); ++i)
    for (Eigen::Index j = 0; j < attention.w2.cols(); ++j) flat.push_back(attention.w2(i, j));
  for (Eigen::Index i = 0; i < attention.b2.size(); ++i) flat.push_back(attention.b2(i));
  flat.push_back(fusion.logits[0]);
  flat.push_back(fusion.logits[1]);
  flat.push_back(logit_scale);
  return flat;
}

void ModelParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw ValidationError("ModelParams::assign: expected " + std::to_string(size()) +
                          " values, got " + std::to_string(flat.size()));
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < attention.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < attention.w1.cols(); ++j) attention.w1(i, j) = flat[k++];
  for (Eigen::Index i = 0; i < attention.b1.size(); ++i) attention.b1(i) = flat[k++];
  for (Eigen::Index i = 0; i < attention.w2.rows(); ++i)
    for (Eigen::Index j = 0; j < attention.w2.cols(); ++j) attention.w2(i, j) = flat[k++];
  for (Eigen::Index i = 0; i < attention.b2.size(); ++i) attention.b2(i) = flat[k++];
  fusion.logits[0] = flat[k++];
  fusion.logits[1] = flat[k++];
  logit_scale = flat[k++];
}

std::string ModelParams::coordinate_name(std::size_t index) const {
  const auto n1 = static_cast<std::size_t>(attention.w1.size());
  const auto nb1 = static_cast<std::size_t>(attention.b1.size());
  const auto n2 = static_cast<std::size_t>(attention.w2.size());
  const auto nb2 = static_cast<std::size_t>(attention.b2.size());
  const auto c1 = static_cast<std::size_t>(attention.w1.cols());
  const auto c2 = static_cast<std::size_t>(attention.w2.cols());
  std::size_t i = index;
  if (i < n1) return "attention.w1[" + std::to_string(i / c1) + "," + std::to_string(i % c1) + "]";
  i -= n1;
  if (i < nb1) return "attention.b1[" + std::to_string(i) + "]";
  i -= nb1;
  if (i < n2) return "attention.w2[" + std::to_string(i / c2) + "," + std::to_string(i % c2) + "]";
  i -= n2;
  if (i < nb2) return "attention.b2[" + std::to_string(i) + "]";
  i -= nb2;
  if (i == 0) return "fusion.w_spatial";
  if (i == 1) return "fusion.w_shape";
  if (i == 2) return "logit_scale";
  return "coordinate " + std::to_string(index);
}

std::vector<char> encode_params(const ModelParams& p) {
  p.attention.validate();
  detail::ByteWriter w;
  w.raw("FSMP");
  w.u32(kParamsVersion);
  w.u32(static_cast<std::uint32_t>(p.attention.channels));
  w.u32(static_cast<std::uint32_t>(p.attention.reduction));
  w.u32(static_cast<std::uint32_t>(p.attention.hidden()));
  const std::vector<double> flat = p.flatten();
  w.u32(static_cast<std::uint32_t>(flat.size()));
  for (double x : flat) w.f64(x);
  return w.bytes();
}

ModelParams decode_params(std::span<const char> bytes) {
  detail::ByteReader r(bytes, "FSMP");
  if (r.raw(4) != "FSMP") throw ParseError("FSMP: bad magic", 0);
  const std::uint32_t version = r.u32("version");
  if (version != kParamsVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t channels = r.u32("channels");
  const std::uint32_t reduction = r.u32("reduction");
  const std::uint32_t hidden = r.u32("hidden");
  if (channels == 0 || reduction == 0 || channels % reduction != 0 ||
      hidden != channels / reduction) {
    r.fail("inconsistent attention layout C=" + std::to_string(channels) +
           " r=" + std::to_string(reduction) + " hidden=" + std::to_string(hidden));
  }
  ModelParams p;
  p.attention = AttentionParams::zeros(channels, reduction);
  const std::uint32_t count = r.u32("count");
  if (count != p.size()) {
    r.fail("declared " + std::to_string(count) + " parameters, layout requires " +
           std::to_string(p.size()));
  }
  if (r.remaining() != static_cast<std::uint64_t>(count) * 8) {
    r.fail("payload is " + std::to_string(r.remaining()) + " bytes, expected " +
           std::to_string(static_cast<std::uint64_t>(count) * 8));
  }
  std::vector<double> flat(count);
  for (auto& x : flat) {
    x = r.f64("parameter");
    if (!std::isfinite(x)) throw ParseError("FSMP: non-finite parameter", r.offset() - 8);
  }
  p.assign(flat);
  return p;
}

void write_params(const ModelParams& p, const std::filesystem::path& path) {
  detail::write_file(path.string(), encode_params(p));
}

ModelParams read_params(const std::filesystem::path& path) {
  const std::vector<char> bytes = detail::read_file(path.string());
  return decode_params(bytes);
}

}  // namespace fsnet
