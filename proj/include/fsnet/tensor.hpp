#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsnet/error.hpp"

namespace fsnet {

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane() const noexcept { return height * width; }
  std::size_t size() const noexcept { return channels * height * width; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// Dense C x H x W grid of doubles, row-major over (channel, row, column).
/// The tag separates spatial feature maps from their DCT spectra at the type level.
template <class Tag>
class Grid3 {
 public:
  Grid3() = default;

  explicit Grid3(Shape shape) : shape_(checked(shape)), data_(shape.size(), 0.0) {}

  Grid3(Shape shape, std::vector<double> data) : shape_(checked(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(std::size_t c, std::size_t u, std::size_t v) const noexcept {
    return (c * shape_.height + u) * shape_.width + v;
  }

  double operator()(std::size_t c, std::size_t u, std::size_t v) const noexcept {
    return data_[index(c, u, v)];
  }
  double& operator()(std::size_t c, std::size_t u, std::size_t v) noexcept {
    return data_[index(c, u, v)];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> channel(std::size_t c) const noexcept {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  std::span<double> channel(std::size_t c) noexcept {
    return std::span<double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }

  double energy() const noexcept {
    double sum = 0.0;
    for (double x : data_) sum += x * x;
    return sum;
  }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  static Shape checked(Shape shape) {
    if (shape.channels == 0 || shape.height == 0 || shape.width == 0) {
      throw ValidationError("tensor shape must be positive in every dimension, got " +
                            to_string(shape));
    }
    return shape;
  }

  Shape shape_{};
  std::vector<double> data_;
};

struct SpatialTag {};
struct SpectralTag {};

using FeatureTensor = Grid3<SpatialTag>;
using Spectrum = Grid3<SpectralTag>;

/// Throws ValidationError naming the first (c, u, v) holding NaN or Inf.
template <class Tag>
void require_finite(const Grid3<Tag>& grid, std::string_view what) {
  const auto values = grid.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const Shape& s = grid.shape();
      const std::size_t c = i / s.plane();
      const std::size_t u = (i % s.plane()) / s.width;
      const std::size_t v = i % s.width;
      throw ValidationError(std::string(what) + ": non-finite value at (" + std::to_string(c) +
                            ", " + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
  }
}

}  // namespace fsnet
