#pragma once

#include <Eigen/Core>
#include <random>

#include "fsnet/rng.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet::testing {

inline FeatureTensor random_tensor(const Shape& s, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  FeatureTensor x(s);
  for (double& v : x.data()) v = normal(rng);
  return x;
}

inline Eigen::VectorXd random_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(n), [&] { return normal(rng); });
}

template <class Tag>
double max_abs_diff(const Grid3<Tag>& a, const Grid3<Tag>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

}  // namespace fsnet::testing
