#include "fsnet/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fsnet::oracle {

Spectrum naive_dct2(const FeatureTensor& x) {
  const Shape& s = x.shape();
  const double h = static_cast<double>(s.height);
  const double w = static_cast<double>(s.width);
  Spectrum f(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t u = 0; u < s.height; ++u) {
      for (std::size_t v = 0; v < s.width; ++v) {
        const double au = u == 0 ? 1.0 / std::sqrt(h) : std::sqrt(2.0 / h);
        const double av = v == 0 ? 1.0 / std::sqrt(w) : std::sqrt(2.0 / w);
        double sum = 0.0;
        for (std::size_t i = 0; i < s.height; ++i) {
          for (std::size_t j = 0; j < s.width; ++j) {
            sum += x(c, i, j) *
                   std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                            static_cast<double>(u) / (2.0 * h)) *
                   std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                            static_cast<double>(v) / (2.0 * w));
          }
        }
        f(c, u, v) = au * av * sum;
      }
    }
  }
  return f;
}

std::vector<std::pair<std::size_t, std::size_t>> mask_by_enumeration(std::size_t height,
                                                                     std::size_t width,
                                                                     std::uint64_t tau_num,
                                                                     std::uint64_t tau_den) {
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for (std::size_t u = 0; u < height; ++u) {
    for (std::size_t v = 0; v < width; ++v) {
      const std::uint64_t lhs = tau_den * (u * width + v * height);
      const std::uint64_t rhs = 2 * tau_num * height * width;
      if (lhs <= rhs) kept.emplace_back(u, v);
    }
  }
  return kept;
}

double explicit_residual_distance(const Eigen::VectorXd& q, const Eigen::VectorXd& mean,
                                  const Eigen::MatrixXd& basis) {
  const auto d = q.size();
  Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(d, d);
  if (basis.cols() > 0) complement -= basis * basis.transpose();
  const Eigen::VectorXd residual = complement * (q - mean);
  return residual.dot(residual);
}

double projector_idempotence_error(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd p = basis * basis.transpose();
  return (p * p - p).norm();
}

std::array<double, 2> analytic_fusion_gradient(const EpisodeResult& result,
                                               const FusionParams& fusion, double scale) {
  const double m = std::max(fusion.logits[0], fusion.logits[1]);
  const double e0 = std::exp(fusion.logits[0] - m);
  const double e1 = std::exp(fusion.logits[1] - m);
  const double a0 = e0 / (e0 + e1);
  const double a1 = e1 / (e0 + e1);

  const auto queries = static_cast<std::size_t>(result.logits.rows());
  const auto way = static_cast<std::size_t>(result.logits.cols());
  // dL/dalpha_v = (1/Q) sum_q sum_k (p_qk - y_qk) * scale * s_v(q, k)
  double g_a0 = 0.0;
  double g_a1 = 0.0;
  for (std::size_t q = 0; q < queries; ++q) {
    std::vector<double> z(way);
    double zmax = -INFINITY;
    for (std::size_t k = 0; k < way; ++k) {
      const DualDistance& d = result.distances[q * way + k];
      z[k] = scale * (a0 * d.s_spatial + a1 * d.s_shape);
      zmax = std::max(zmax, z[k]);
    }
    double zsum = 0.0;
    for (double zk : z) zsum += std::exp(zk - zmax);
    for (std::size_t k = 0; k < way; ++k) {
      const double p = std::exp(z[k] - zmax) / zsum;
      const double delta = p - (result.labels[q] == k ? 1.0 : 0.0);
      const DualDistance& d = result.distances[q * way + k];
      g_a0 += delta * scale * d.s_spatial;
      g_a1 += delta * scale * d.s_shape;
    }
  }
  g_a0 /= static_cast<double>(queries);
  g_a1 /= static_cast<double>(queries);
  // dalpha_i/dw_j = alpha_i (delta_ij - alpha_j)
  return {g_a0 * a0 * (1.0 - a0) + g_a1 * (-a1 * a0),
          g_a0 * (-a0 * a1) + g_a1 * a1 * (1.0 - a1)};
}

}  // namespace fsnet::oracle
