#include "fsnet/spectral.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fsnet {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

// Entry (k, n) = alpha(k) * cos(pi * (2n + 1) * k / (2N)).
std::vector<double> cosine_basis(std::size_t n) {
  std::vector<double> basis(n * n);
  const double dc = std::sqrt(1.0 / static_cast<double>(n));
  const double ac = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = k == 0 ? dc : ac;
    for (std::size_t x = 0; x < n; ++x) {
      const double angle = std::numbers::pi * static_cast<double>((2 * x + 1) * k) /
                           static_cast<double>(2 * n);
      basis[k * n + x] = alpha * std::cos(angle);
    }
  }
  return basis;
}

}  // namespace

Dct2Plan::Dct2Plan(std::size_t height, std::size_t width)
    : height_(height), width_(width), row_basis_(cosine_basis(height)), col_basis_(cosine_basis(width)) {
  if (height == 0 || width == 0) throw ValidationError("DCT plane must be non-empty");
}

Spectrum Dct2Plan::forward(const FeatureTensor& x) const {
  const Shape& s = x.shape();
  if (s.height != height_ || s.width != width_) {
    throw ValidationError("dct2: tensor plane " + to_string(s) + " does not match plan " +
                          std::to_string(height_) + "x" + std::to_string(width_));
  }
  require_finite(x, "dct2 input");

  const auto h = static_cast<Eigen::Index>(height_);
  const auto w = static_cast<Eigen::Index>(width_);
  ConstMap rows(row_basis_.data(), h, h);
  ConstMap cols(col_basis_.data(), w, w);

  Spectrum out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    ConstMap plane(x.channel(c).data(), h, w);
    MutMap dst(out.channel(c).data(), h, w);
    dst.noalias() = rows * plane * cols.transpose();
  }
  return out;
}

FeatureTensor Dct2Plan::inverse(const Spectrum& f) const {
  const Shape& s = f.shape();
  if (s.height != height_ || s.width != width_) {
    throw ValidationError("idct2: spectrum plane " + to_string(s) + " does not match plan " +
                          std::to_string(height_) + "x" + std::to_string(width_));
  }
  require_finite(f, "idct2 input");

  const auto h = static_cast<Eigen::Index>(height_);
  const auto w = static_cast<Eigen::Index>(width_);
  ConstMap rows(row_basis_.data(), h, h);
  ConstMap cols(col_basis_.data(), w, w);

  FeatureTensor out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    ConstMap plane(f.channel(c).data(), h, w);
    MutMap dst(out.channel(c).data(), h, w);
    dst.noalias() = rows.transpose() * plane * cols;
  }
  return out;
}

Spectrum dct2(const FeatureTensor& x) {
  return Dct2Plan(x.shape().height, x.shape().width).forward(x);
}

FeatureTensor idct2(const Spectrum& f) {
  return Dct2Plan(f.shape().height, f.shape().width).inverse(f);
}

LowPassMask::LowPassMask(std::size_t height, std::size_t width, double tau)
    : height_(height), width_(width), tau_(tau), bits_(height * width, 0) {
  if (height == 0 || width == 0) throw ValidationError("mask plane must be non-empty");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ValidationError("mask cutoff tau must lie in (0, 1), got " + std::to_string(tau));
  }
  // (u/H + v/W)/2 <= tau  <=>  u*W + v*H <= 2*tau*H*W. The left side is an exact
  // integer; the relative slack absorbs the representation error of decimal tau
  // such as 0.3 so boundary points are not lost to rounding.
  const double hw = static_cast<double>(height) * static_cast<double>(width);
  const double bound = 2.0 * tau * hw;
  const double tol = 1e-12 * std::max(1.0, bound);
  for (std::size_t u = 0; u < height; ++u) {
    for (std::size_t v = 0; v < width; ++v) {
      const double score = static_cast<double>(u * width + v * height);
      const double slack = bound - score;
#ifdef FSNET_FAULT_STRICT_MASK
      bits_[u * width + v] = slack > tol ? 1 : 0;
#else
      bits_[u * width + v] = slack >= -tol ? 1 : 0;
#endif
    }
  }
}

std::size_t LowPassMask::kept_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

LowPassMask build_mask(std::size_t height, std::size_t width, double tau) {
  return LowPassMask(height, width, tau);
}

Spectrum apply_mask(const Spectrum& f, const LowPassMask& mask) {
  const Shape& s = f.shape();
  if (s.height != mask.height() || s.width != mask.width()) {
    throw ValidationError("apply_mask: spectrum " + to_string(s) + " does not match mask " +
                          std::to_string(mask.height()) + "x" + std::to_string(mask.width()));
  }
  Spectrum out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t u = 0; u < s.height; ++u) {
      for (std::size_t v = 0; v < s.width; ++v) {
        if (mask.keeps(u, v)) out(c, u, v) = f(c, u, v);
      }
    }
  }
  return out;
}

}  // namespace fsnet
