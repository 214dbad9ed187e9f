#include <doctest.h>

#include "fsnet/attention.hpp"
#include "fsnet/error.hpp"
#include "fsnet/spectral.hpp"
#include "helpers.hpp"

using namespace fsnet;
using fsnet::testing::max_abs_diff;
using fsnet::testing::random_tensor;
using fsnet::testing::random_vector;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Gains pinned to ~1 by a large output bias.
AttentionParams unit_gain(std::size_t channels) {
  AttentionParams p = AttentionParams::zeros(channels, 1);
  p.b2.setConstant(60.0);
  return p;
}

}  // namespace

TEST_CASE("gap averages signed coefficients per channel") {
  SUBCASE("hand example") {
    const Spectrum f(Shape{2, 2, 2}, {1, 2, 3, 4, 0, 0, 0, 8});
    const Eigen::VectorXd e = gap(f);
    CHECK(e(0) == 2.5);
    CHECK(e(1) == 2.0);
  }
  SUBCASE("constant and zero spectra") {
    Spectrum f(Shape{3, 4, 5});
    CHECK(gap(f).isZero(0.0));
    for (std::size_t c = 0; c < 3; ++c) {
      for (double& v : f.channel(c)) v = -1.5 * static_cast<double>(c);
    }
    const Eigen::VectorXd e = gap(f);
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(e(c) == doctest::Approx(-1.5 * c));
  }
}

TEST_CASE("layer_norm") {
  SUBCASE("constant vector collapses to zero") {
    CHECK(layer_norm(Eigen::VectorXd::Constant(7, 4.2)).isZero(0.0));
  }
  SUBCASE("(1, -1) is already normalized up to epsilon") {
    Eigen::VectorXd e(2);
    e << 1.0, -1.0;
    const Eigen::VectorXd y = layer_norm(e);
    const double expected = 1.0 / std::sqrt(1.0 + AttentionParams::kLayerNormEpsilon);
    CHECK(y(0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(y(1) == doctest::Approx(-expected).epsilon(1e-14));
  }
  SUBCASE("(3, 1) maps to about (1, -1)") {
    Eigen::VectorXd e(2);
    e << 3.0, 1.0;
    const Eigen::VectorXd y = layer_norm(e);
    CHECK(y(0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(y(1) == doctest::Approx(-1.0).epsilon(1e-5));
  }
  SUBCASE("output mean is zero for any input") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd e = random_vector(1 + rng() % 40, rng) * std::pow(10.0, rng() % 7 - 3.0);
      CHECK(std::abs(layer_norm(e).mean()) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(layer_norm(Eigen::VectorXd()), ValidationError);
}

TEST_CASE("attention_weights hand example") {
  AttentionParams p = AttentionParams::zeros(2, 2);
  p.w1 << 1.0, 0.0;
  p.w2 << 2.0, -2.0;
  Eigen::VectorXd e(2);
  e << 3.0, 1.0;
  const Eigen::VectorXd w = attention_weights(e, p);
  // LN(e) is (1, -1) up to the epsilon in the variance.
  const double ln = 1.0 / std::sqrt(1.0 + AttentionParams::kLayerNormEpsilon);
  CHECK(w(0) == doctest::Approx(sigmoid(2.0 * ln)).epsilon(1e-14));
  CHECK(w(1) == doctest::Approx(sigmoid(-2.0 * ln)).epsilon(1e-14));
  CHECK(w(0) == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(w(1) == doctest::Approx(0.1192).epsilon(1e-3));
}

TEST_CASE("leaky slope acts on negative hidden units") {
  AttentionParams p = AttentionParams::zeros(2, 2);
  p.w1 << -1.0, 0.0;
  p.w2 << 1.0, 0.0;
  Eigen::VectorXd e(2);
  e << 3.0, 1.0;
  const double ln = 1.0 / std::sqrt(1.0 + AttentionParams::kLayerNormEpsilon);
  const Eigen::VectorXd w = attention_weights(e, p);
  CHECK(w(0) == doctest::Approx(sigmoid(-0.1 * ln)).epsilon(1e-14));
  CHECK(w(1) == doctest::Approx(0.5));
}

TEST_CASE("zero parameters give gains of one half") {
  Rng rng(6);
  const AttentionParams p = AttentionParams::zeros(8, 4);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd w = attention_weights(random_vector(8, rng), p);
    for (Eigen::Index c = 0; c < 8; ++c) CHECK(w(c) == 0.5);
  }
  CHECK(attention_weights(Eigen::VectorXd::Zero(8), p).isApproxToConstant(0.5));
}

TEST_CASE("gains stay strictly inside (0, 1)") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const std::size_t c = 4 * (1 + rng() % 6);
    AttentionParams p = AttentionParams::initial(c, 4, rng());
    p.b2 = random_vector(c, rng) * 3.0;
    const Eigen::VectorXd w = attention_weights(random_vector(c, rng) * 1e3, p);
    CHECK((w.array() > 0.0).all());
    CHECK((w.array() < 1.0).all());
  }
}

TEST_CASE("attention parameter layout is validated") {
  CHECK_THROWS_AS(AttentionParams::zeros(6, 4), ValidationError);
  AttentionParams p = AttentionParams::initial(8, 4, 1);
  CHECK(p.w1.rows() == 2);
  CHECK(p.w1.cols() == 8);
  CHECK(p.w2.rows() == 8);
  CHECK((p.w1.array().abs() < 1.0 / std::sqrt(8.0)).all());
  CHECK(p.b1.isZero(0.0));
  CHECK(p.b2.isZero(0.0));
  CHECK_THROWS_AS(attention_weights(Eigen::VectorXd::Zero(4), p), ValidationError);
  p.b2.resize(3);
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("reweight scales each channel") {
  Rng rng(8);
  const Spectrum f = dct2(random_tensor(Shape{3, 4, 4}, rng));
  CHECK(reweight(f, Eigen::VectorXd::Ones(3)) == f);
  CHECK(reweight(f, Eigen::VectorXd::Zero(3)).energy() == 0.0);
  const Eigen::VectorXd w = random_vector(3, rng);
  const Spectrum g = reweight(f, w);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t u = 0; u < 4; ++u) {
      for (std::size_t v = 0; v < 4; ++v) {
        CHECK(g(c, u, v) == f(c, u, v) * w(static_cast<Eigen::Index>(c)));
      }
    }
  }
  CHECK_THROWS_AS(reweight(f, Eigen::VectorXd::Ones(2)), ValidationError);
}

TEST_CASE("frequency branch") {
  Rng rng(9);
  const Shape s{4, 8, 8};

  SUBCASE("full passband and unit gains reproduce the input") {
    const FeatureTensor x = random_tensor(s, rng);
    CHECK(max_abs_diff(frequency_branch(x, unit_gain(4), LowPassMask(8, 8, 0.99)), x) <= 1e-8);
  }

  const LowPassMask mask(8, 8, 0.3);
  SUBCASE("pure high-frequency input vanishes") {
    Spectrum f = dct2(random_tensor(s, rng));
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t u = 0; u < 8; ++u) {
        for (std::size_t v = 0; v < 8; ++v) {
          if (mask.keeps(u, v)) f(c, u, v) = 0.0;
        }
      }
    }
    const FeatureTensor out = frequency_branch(idct2(f), AttentionParams::initial(4, 4, 3), mask);
    for (double v : out.data()) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("low-frequency input with unit gains is unchanged") {
    const Spectrum f = apply_mask(dct2(random_tensor(s, rng)), mask);
    const FeatureTensor x = idct2(f);
    CHECK(max_abs_diff(frequency_branch(x, unit_gain(4), mask), x) <= 1e-8);
    CHECK(max_abs_diff(low_pass_branch(x, mask), x) <= 1e-12);
  }
  SUBCASE("output has no energy outside the passband") {
    for (int t = 0; t < 20; ++t) {
      const FeatureTensor out =
          frequency_branch(random_tensor(s, rng), AttentionParams::initial(4, 4, rng()), mask);
      const Spectrum f = dct2(out);
      for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t u = 0; u < 8; ++u) {
          for (std::size_t v = 0; v < 8; ++v) {
            if (!mask.keeps(u, v)) CHECK(std::abs(f(c, u, v)) <= 1e-9);
          }
        }
      }
      // Re-filtering leaves the passband spectrum as it was.
      CHECK(max_abs_diff(apply_mask(f, mask), f) <= 1e-9);
    }
  }
  SUBCASE("plan overload agrees") {
    const FeatureTensor x = random_tensor(s, rng);
    const AttentionParams p = AttentionParams::initial(4, 4, 11);
    CHECK(frequency_branch(Dct2Plan(8, 8), x, p, mask) == frequency_branch(x, p, mask));
  }
}
