#include "fsnet/subspace.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fsnet/error.hpp"

namespace fsnet {

std::string_view to_string(View view) {
  return view == View::spatial ? "spatial" : "shape";
}

std::array<double, 2> FusionParams::alpha() const noexcept {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

Eigen::VectorXd flatten(const FeatureTensor& x) {
  const auto data = x.data();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

FeatureTensor unflatten(const Eigen::VectorXd& v, const Shape& shape) {
  if (static_cast<std::size_t>(v.size()) != shape.size()) {
    throw ValidationError("unflatten: vector of length " + std::to_string(v.size()) +
                          " cannot fill shape " + to_string(shape));
  }
  return FeatureTensor(shape, std::vector<double>(v.data(), v.data() + v.size()));
}

ClassSubspace build_subspace(std::span<const Eigen::VectorXd> support, std::size_t d_max,
                             double jitter_scale, Rng& rng, View view, std::string_view context) {
  const auto where = [&] {
    return context.empty() ? std::string() : " (" + std::string(context) + ")";
  };
  if (support.empty()) throw ValidationError("build_subspace: empty support" + where());
  if (d_max == 0) throw ValidationError("build_subspace: d_max must be >= 1" + where());
  if (!(jitter_scale >= 0.0) || !std::isfinite(jitter_scale)) {
    throw ValidationError("build_subspace: jitter scale must be finite and >= 0" + where());
  }
  const Eigen::Index dim = support.front().size();
  const auto shots = static_cast<Eigen::Index>(support.size());
  if (dim == 0) throw ValidationError("build_subspace: zero-dimensional features" + where());

  Eigen::MatrixXd s(dim, shots);
  for (Eigen::Index k = 0; k < shots; ++k) {
    const Eigen::VectorXd& col = support[static_cast<std::size_t>(k)];
    if (col.size() != dim) {
      throw ValidationError("build_subspace: support vectors differ in length" + where());
    }
    s.col(k) = col;
  }

  ClassSubspace out;
  out.view = view;
  out.mean = s.rowwise().mean();
  s.colwise() -= out.mean;

  if (jitter_scale > 0.0) {
    std::normal_distribution<double> noise(0.0, jitter_scale);
    for (Eigen::Index k = 0; k < shots; ++k)
      for (Eigen::Index i = 0; i < dim; ++i) s(i, k) += noise(rng);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU);
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (!u.allFinite() || !sigma.allFinite()) {
    throw NumericalError("SVD produced non-finite factors" + where());
  }

  const Eigen::Index cap =
      std::min<Eigen::Index>({static_cast<Eigen::Index>(d_max), shots, dim, sigma.size()});
  const double floor = sigma.size() > 0 ? sigma(0) * static_cast<double>(std::max(dim, shots)) *
                                               std::numeric_limits<double>::epsilon()
                                         : 0.0;
  Eigen::Index rank = 0;
  while (rank < cap && sigma(rank) > floor) ++rank;

  out.basis = u.leftCols(rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    Eigen::Index pivot = 0;
    out.basis.col(j).cwiseAbs().maxCoeff(&pivot);
    if (out.basis(pivot, j) < 0.0) out.basis.col(j) *= -1.0;
  }
  return out;
}

double projection_distance(const Eigen::VectorXd& q, const ClassSubspace& sub) {
  if (q.size() != sub.mean.size()) {
    throw ValidationError("projection_distance: query length " + std::to_string(q.size()) +
                          " vs subspace dimension " + std::to_string(sub.mean.size()));
  }
  const Eigen::VectorXd centered = q - sub.mean;
  double residual = centered.squaredNorm();
  if (sub.basis.cols() > 0) residual -= (sub.basis.transpose() * centered).squaredNorm();
  return std::max(residual, 0.0);
}

double similarity(double dist, double epsilon) {
  if (!(dist >= 0.0)) {
    throw ValidationError("similarity: distance must be >= 0, got " + std::to_string(dist));
  }
  if (!(epsilon > 0.0)) throw ValidationError("similarity: epsilon must be > 0");
  return -std::sqrt(dist + epsilon);
}

FusionResult fuse(double d_spatial, double d_shape, const FusionParams& fp, double epsilon,
                  FusionSpace space) {
  FusionResult r;
  r.alpha = fp.alpha();
  DualDistance& d = r.distance;
  d.d_spatial = d_spatial;
  d.d_shape = d_shape;
  d.s_spatial = similarity(d_spatial, epsilon);
  d.s_shape = similarity(d_shape, epsilon);
  if (space == FusionSpace::similarity) {
    d.fused = r.alpha[0] * d.s_spatial + r.alpha[1] * d.s_shape;
  } else {
    d.fused = -(r.alpha[0] * d_spatial + r.alpha[1] * d_shape);
  }
  return r;
}

std::size_t argmax(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

Classification classify_query(const Eigen::VectorXd& q_spatial, const Eigen::VectorXd& q_shape,
                              std::span<const DualSubspace> classes, const FusionParams& fp,
                              double scale, double epsilon, FusionSpace space) {
  if (classes.empty()) throw ValidationError("classify_query: no classes");
  Classification out;
  out.logits.resize(static_cast<Eigen::Index>(classes.size()));
  out.distances.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (!classes[k].shape) {
      throw ValidationError("classify_query: class " + std::to_string(k) +
                            " has no shape-view subspace");
    }
    const FusionResult r = fuse(projection_distance(q_spatial, classes[k].spatial),
                                projection_distance(q_shape, *classes[k].shape), fp, epsilon, space);
    out.distances.push_back(r.distance);
    out.logits(static_cast<Eigen::Index>(k)) = scale * r.distance.fused;
  }
  out.predicted = argmax(out.logits);
  return out;
}

Classification classify_query_spatial(const Eigen::VectorXd& q_spatial,
                                      std::span<const DualSubspace> classes, double scale,
                                      double epsilon, FusionSpace space) {
  if (classes.empty()) throw ValidationError("classify_query: no classes");
  Classification out;
  out.logits.resize(static_cast<Eigen::Index>(classes.size()));
  out.distances.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    DualDistance d;
    d.d_spatial = projection_distance(q_spatial, classes[k].spatial);
    d.s_spatial = similarity(d.d_spatial, epsilon);
    d.fused = space == FusionSpace::similarity ? d.s_spatial : -d.d_spatial;
    out.distances.push_back(d);
    out.logits(static_cast<Eigen::Index>(k)) = scale * d.fused;
  }
  out.predicted = argmax(out.logits);
  return out;
}

}  // namespace fsnet
