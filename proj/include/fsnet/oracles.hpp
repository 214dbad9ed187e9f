#pragma once

// Slow, literal reference computations. They deliberately share no code path
// with the production implementations they are used to check.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fsnet/pipeline.hpp"
#include "fsnet/subspace.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet::oracle {

/// Quadruple sum over (u, v, x, y) of the orthonormal DCT-II definition.
Spectrum naive_dct2(const FeatureTensor& x);

/// Kept (u, v) pairs of the low-pass mask for tau = num / den, decided in exact
/// integer arithmetic: den * (u*W + v*H) <= 2 * num * H * W.
std::vector<std::pair<std::size_t, std::size_t>> mask_by_enumeration(std::size_t height,
                                                                     std::size_t width,
                                                                     std::uint64_t tau_num,
                                                                     std::uint64_t tau_den);

/// ||(I - P P^T)(q - mu)||^2 with the D x D projector materialized.
double explicit_residual_distance(const Eigen::VectorXd& q, const Eigen::VectorXd& mean,
                                  const Eigen::MatrixXd& basis);

/// ||P P^T P P^T - P P^T||_F.
double projector_idempotence_error(const Eigen::MatrixXd& basis);

/// d L_cls / d (w_spatial, w_shape) by the chain rule through softmax over
/// classes and softmax over fusion logits, using the per-view similarities
/// recorded in `result` (similarity-space fusion).
std::array<double, 2> analytic_fusion_gradient(const EpisodeResult& result,
                                               const FusionParams& fusion, double scale);

}  // namespace fsnet::oracle
