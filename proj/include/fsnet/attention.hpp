#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>

#include "fsnet/spectral.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

/// Bottleneck channel attention: w = sigmoid(W2 * lrelu(W1 * LN(e) + b1) + b2).
struct AttentionParams {
  static constexpr double kLeakySlope = 0.1;
  static constexpr double kLayerNormEpsilon = 1e-5;

  std::size_t channels = 0;
  std::size_t reduction = 1;
  Eigen::MatrixXd w1;  // hidden x channels
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // channels x hidden
  Eigen::VectorXd b2;  // channels

  std::size_t hidden() const noexcept { return channels / reduction; }

  /// Zero weights and biases, with the given layout.
  static AttentionParams zeros(std::size_t channels, std::size_t reduction);

  /// Weights uniform in (-1/sqrt(C), 1/sqrt(C)) from `seed`, biases zero.
  static AttentionParams initial(std::size_t channels, std::size_t reduction, std::uint64_t seed);

  /// Throws ValidationError if the matrix shapes disagree with (channels, reduction).
  void validate() const;

  friend bool operator==(const AttentionParams& a, const AttentionParams& b) {
    return a.channels == b.channels && a.reduction == b.reduction && a.w1 == b.w1 &&
           a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

/// Per-channel mean of the (signed) coefficients over the full H x W plane.
Eigen::VectorXd gap(const Spectrum& f);

/// (e - mean) / sqrt(var + eps), biased variance, no affine.
Eigen::VectorXd layer_norm(const Eigen::VectorXd& e,
                           double eps = AttentionParams::kLayerNormEpsilon);

/// Channel gains in (0, 1) from pooled energies; layer norm is applied inside.
Eigen::VectorXd attention_weights(const Eigen::VectorXd& pooled, const AttentionParams& p);

/// F'(c, u, v) = F(c, u, v) * w(c).
Spectrum reweight(const Spectrum& f, const Eigen::VectorXd& w);

/// Shape view of a feature map: DCT, low-pass, channel attention, IDCT.
FeatureTensor frequency_branch(const FeatureTensor& x, const AttentionParams& p,
                               const LowPassMask& mask);

/// Same as frequency_branch with the attention stage bypassed (unit gains).
FeatureTensor low_pass_branch(const FeatureTensor& x, const LowPassMask& mask);

/// Overloads reusing a precomputed transform plan.
FeatureTensor frequency_branch(const Dct2Plan& plan, const FeatureTensor& x,
                               const AttentionParams& p, const LowPassMask& mask);
FeatureTensor low_pass_branch(const Dct2Plan& plan, const FeatureTensor& x,
                              const LowPassMask& mask);

}  // namespace fsnet
