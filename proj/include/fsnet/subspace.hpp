#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsnet/rng.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

enum class View { spatial = 0, shape = 1 };

std::string_view to_string(View view);

/// How per-view distances are combined into one class score.
///  - similarity: score = sum_v alpha_v * -sqrt(d_v + eps)
///  - distance:   score = -(sum_v alpha_v * d_v)
/// Both are "higher is better" so they can be used as logits directly.
enum class FusionSpace { similarity, distance };

/// Affine class subspace: mean plus an orthonormal basis (D x d).
struct ClassSubspace {
  View view = View::spatial;
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(basis.cols()); }
};

struct FusionParams {
  std::array<double, 2> logits{1.0, 1.0};  // (spatial, shape)

  /// softmax(logits), ordered (spatial, shape).
  std::array<double, 2> alpha() const noexcept;

  friend bool operator==(const FusionParams&, const FusionParams&) = default;
};

struct DualDistance {
  double d_spatial = 0.0;
  double d_shape = 0.0;
  double s_spatial = 0.0;
  double s_shape = 0.0;
  double fused = 0.0;
};

Eigen::VectorXd flatten(const FeatureTensor& x);
FeatureTensor unflatten(const Eigen::VectorXd& v, const Shape& shape);

/// Centers the support (one vector per shot), adds N(0, jitter_scale^2) to every
/// entry of the centered matrix, and keeps the top min(d_max, K, D) left singular
/// vectors. Directions whose singular value is zero to working precision are
/// dropped, so a jitter-free single shot yields an empty basis. Basis column signs
/// are canonical: the largest-magnitude entry of each column is positive.
/// `context` is quoted in diagnostics (e.g. "episode 3 class 1 view shape").
ClassSubspace build_subspace(std::span<const Eigen::VectorXd> support, std::size_t d_max,
                             double jitter_scale, Rng& rng, View view = View::spatial,
                             std::string_view context = {});

/// ||(I - P P^T)(q - mu)||^2 evaluated as ||q~||^2 - ||P^T q~||^2, clamped at zero.
double projection_distance(const Eigen::VectorXd& q, const ClassSubspace& sub);

/// -sqrt(dist + eps).
double similarity(double dist, double epsilon);

struct FusionResult {
  std::array<double, 2> alpha{};
  DualDistance distance;
};

FusionResult fuse(double d_spatial, double d_shape, const FusionParams& fp, double epsilon,
                  FusionSpace space = FusionSpace::similarity);

/// Both views of one class. `shape` is empty when the classifier runs spatial-only.
struct DualSubspace {
  ClassSubspace spatial;
  std::optional<ClassSubspace> shape;
};

struct Classification {
  Eigen::VectorXd logits;
  std::size_t predicted = 0;
  std::vector<DualDistance> distances;  // one per class
};

/// Fuses both views for every class; logit_k = scale * fused_k. Ties go to the
/// lowest class index. Throws if a class lacks its shape subspace.
Classification classify_query(const Eigen::VectorXd& q_spatial, const Eigen::VectorXd& q_shape,
                              std::span<const DualSubspace> classes, const FusionParams& fp,
                              double scale, double epsilon,
                              FusionSpace space = FusionSpace::similarity);

/// Spatial view only (the single-subspace baseline); logit_k = scale * score_k.
Classification classify_query_spatial(const Eigen::VectorXd& q_spatial,
                                      std::span<const DualSubspace> classes, double scale,
                                      double epsilon,
                                      FusionSpace space = FusionSpace::similarity);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(const Eigen::VectorXd& v);

}  // namespace fsnet
