#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fsnet/tensor.hpp"

namespace fsnet {

/// Precomputed orthonormal DCT-II bases for an H x W plane. The 2-D transform
/// is applied separably: rows of the plane by the H-point basis, columns by the
/// W-point basis.
class Dct2Plan {
 public:
  Dct2Plan(std::size_t height, std::size_t width);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  Spectrum forward(const FeatureTensor& x) const;
  FeatureTensor inverse(const Spectrum& f) const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> row_basis_;  // height x height, entry (u, x)
  std::vector<double> col_basis_;  // width x width, entry (v, y)
};

/// Orthonormal 2-D DCT-II applied independently to every channel.
Spectrum dct2(const FeatureTensor& x);

/// Inverse of dct2 (orthonormal DCT-III per channel).
FeatureTensor idct2(const Spectrum& f);

/// Low-pass mask over normalized Manhattan frequency: (u, v) is kept when
/// (u/H + v/W) / 2 <= tau.
class LowPassMask {
 public:
  LowPassMask(std::size_t height, std::size_t width, double tau);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  double tau() const noexcept { return tau_; }

  bool keeps(std::size_t u, std::size_t v) const noexcept { return bits_[u * width_ + v] != 0; }
  std::size_t kept_count() const noexcept;

 private:
  std::size_t height_;
  std::size_t width_;
  double tau_;
  std::vector<std::uint8_t> bits_;
};

LowPassMask build_mask(std::size_t height, std::size_t width, double tau);

/// Zeroes every coefficient the mask drops, in every channel.
Spectrum apply_mask(const Spectrum& f, const LowPassMask& mask);

}  // namespace fsnet
