#include "fsnet/attention.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fsnet {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

AttentionParams AttentionParams::zeros(std::size_t channels, std::size_t reduction) {
  if (channels == 0 || reduction == 0 || channels % reduction != 0) {
    throw ValidationError("attention reduction " + std::to_string(reduction) +
                          " must be positive and divide the channel count " +
                          std::to_string(channels));
  }
  AttentionParams p;
  p.channels = channels;
  p.reduction = reduction;
  const auto c = static_cast<Eigen::Index>(channels);
  const auto h = static_cast<Eigen::Index>(channels / reduction);
  p.w1 = Eigen::MatrixXd::Zero(h, c);
  p.b1 = Eigen::VectorXd::Zero(h);
  p.w2 = Eigen::MatrixXd::Zero(c, h);
  p.b2 = Eigen::VectorXd::Zero(c);
  return p;
}

AttentionParams AttentionParams::initial(std::size_t channels, std::size_t reduction,
                                         std::uint64_t seed) {
  AttentionParams p = zeros(channels, reduction);
  const double bound = 1.0 / std::sqrt(static_cast<double>(channels));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < p.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = dist(rng);
  for (Eigen::Index i = 0; i < p.w2.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w2.cols(); ++j) p.w2(i, j) = dist(rng);
  return p;
}

void AttentionParams::validate() const {
  if (channels == 0 || reduction == 0 || channels % reduction != 0) {
    throw ValidationError("attention: reduction " + std::to_string(reduction) +
                          " does not divide channels " + std::to_string(channels));
  }
  const auto c = static_cast<Eigen::Index>(channels);
  const auto h = static_cast<Eigen::Index>(hidden());
  if (w1.rows() != h || w1.cols() != c || b1.size() != h || w2.rows() != c || w2.cols() != h ||
      b2.size() != c) {
    throw ValidationError("attention: parameter shapes inconsistent with C=" +
                          std::to_string(channels) + ", r=" + std::to_string(reduction));
  }
}

Eigen::VectorXd gap(const Spectrum& f) {
  const Shape& s = f.shape();
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.channels));
  for (std::size_t c = 0; c < s.channels; ++c) {
    double sum = 0.0;
    for (double x : f.channel(c)) sum += x;
    out(static_cast<Eigen::Index>(c)) = sum / static_cast<double>(s.plane());
  }
  return out;
}

Eigen::VectorXd layer_norm(const Eigen::VectorXd& e, double eps) {
  if (e.size() == 0) throw ValidationError("layer_norm: empty vector");
  const double mean = e.mean();
  const Eigen::VectorXd centered = e.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(e.size());
  return centered / std::sqrt(var + eps);
}

Eigen::VectorXd attention_weights(const Eigen::VectorXd& pooled, const AttentionParams& p) {
  p.validate();
  if (pooled.size() != static_cast<Eigen::Index>(p.channels)) {
    throw ValidationError("attention_weights: got " + std::to_string(pooled.size()) +
                          " channels, parameters expect " + std::to_string(p.channels));
  }
  Eigen::VectorXd hidden = p.w1 * layer_norm(pooled) + p.b1;
  for (Eigen::Index i = 0; i < hidden.size(); ++i) {
    if (hidden(i) < 0.0) hidden(i) *= AttentionParams::kLeakySlope;
  }
  Eigen::VectorXd logits = p.w2 * hidden + p.b2;
  return logits.unaryExpr([](double z) { return sigmoid(z); });
}

Spectrum reweight(const Spectrum& f, const Eigen::VectorXd& w) {
  const Shape& s = f.shape();
  if (w.size() != static_cast<Eigen::Index>(s.channels)) {
    throw ValidationError("reweight: " + std::to_string(w.size()) + " gains for " +
                          std::to_string(s.channels) + " channels");
  }
  Spectrum out = f;
  for (std::size_t c = 0; c < s.channels; ++c) {
    const double gain = w(static_cast<Eigen::Index>(c));
    for (double& x : out.channel(c)) x *= gain;
  }
  return out;
}

FeatureTensor frequency_branch(const Dct2Plan& plan, const FeatureTensor& x,
                               const AttentionParams& p, const LowPassMask& mask) {
  const Spectrum low = apply_mask(plan.forward(x), mask);
  return plan.inverse(reweight(low, attention_weights(gap(low), p)));
}

FeatureTensor low_pass_branch(const Dct2Plan& plan, const FeatureTensor& x,
                              const LowPassMask& mask) {
  return plan.inverse(apply_mask(plan.forward(x), mask));
}

FeatureTensor frequency_branch(const FeatureTensor& x, const AttentionParams& p,
                               const LowPassMask& mask) {
  return frequency_branch(Dct2Plan(x.shape().height, x.shape().width), x, p, mask);
}

FeatureTensor low_pass_branch(const FeatureTensor& x, const LowPassMask& mask) {
  return low_pass_branch(Dct2Plan(x.shape().height, x.shape().width), x, mask);
}

}  // namespace fsnet
