#include <doctest.h>

#include "fsnet/error.hpp"
#include "fsnet/oracles.hpp"
#include "fsnet/spectral.hpp"
#include "helpers.hpp"

using namespace fsnet;
using fsnet::testing::max_abs_diff;
using fsnet::testing::random_tensor;

TEST_CASE("dct2 of a constant 1x2x2 block puts everything in the DC term") {
  const FeatureTensor x(Shape{1, 2, 2}, {3, 3, 3, 3});
  const Spectrum f = dct2(x);
  CHECK(f(0, 0, 0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(std::abs(f(0, 0, 1)) < 1e-14);
  CHECK(std::abs(f(0, 1, 0)) < 1e-14);
  CHECK(std::abs(f(0, 1, 1)) < 1e-14);
}

TEST_CASE("idct2 of a lone DC coefficient is constant") {
  Spectrum f(Shape{1, 2, 2});
  f(0, 0, 0) = 6.0;
  const FeatureTensor x = idct2(f);
  for (double v : x.data()) CHECK(v == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("zero in, zero out") {
  for (const Shape s : {Shape{1, 1, 1}, Shape{3, 4, 7}, Shape{2, 8, 8}}) {
    const Spectrum f = dct2(FeatureTensor(s));
    const FeatureTensor x = idct2(Spectrum(s));
    for (double v : f.data()) CHECK(v == 0.0);
    for (double v : x.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("dct2 matches the quadruple-sum definition") {
  Rng rng(1);
  for (int t = 0; t < 40; ++t) {
    const Shape s{1 + rng() % 3, 1 + rng() % 8, 1 + rng() % 8};
    const FeatureTensor x = random_tensor(s, rng);
    CHECK(max_abs_diff(dct2(x), oracle::naive_dct2(x)) <= 1e-9);
  }
  const FeatureTensor x = random_tensor(Shape{1, 8, 8}, rng);
  CHECK(max_abs_diff(dct2(x), oracle::naive_dct2(x)) <= 1e-9);
}

TEST_CASE("round trip and Parseval on inputs up to 1e3") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Shape s{1 + rng() % 4, 1 + rng() % 9, 1 + rng() % 9};
    const FeatureTensor x = random_tensor(s, rng, 300.0);
    const Spectrum f = dct2(x);
    const double scale = std::max(1.0, x.energy());
    CHECK(max_abs_diff(idct2(f), x) <= 1e-9 * std::sqrt(scale));
    CHECK(std::abs(f.energy() - x.energy()) <= 1e-9 * x.energy());
  }
  const FeatureTensor x = random_tensor(Shape{1, 5, 5}, rng);
  CHECK(max_abs_diff(idct2(dct2(x)), x) <= 1e-9);
}

TEST_CASE("plan reuse gives the same answer as the free functions") {
  Rng rng(3);
  const Dct2Plan plan(6, 5);
  const FeatureTensor x = random_tensor(Shape{2, 6, 5}, rng);
  CHECK(plan.forward(x) == dct2(x));
  CHECK_THROWS_AS(plan.forward(random_tensor(Shape{2, 5, 6}, rng)), ValidationError);
}

TEST_CASE("mask on 10x10 at tau 0.3 keeps u+v <= 6") {
  const LowPassMask m = build_mask(10, 10, 0.3);
  CHECK(m.kept_count() == 28);
  for (std::size_t u = 0; u < 10; ++u) {
    for (std::size_t v = 0; v < 10; ++v) CHECK(m.keeps(u, v) == (u + v <= 6));
  }
}

TEST_CASE("mask on 2x2 at tau 0.3 drops only the corner") {
  const LowPassMask m = build_mask(2, 2, 0.3);
  CHECK(m.kept_count() == 3);
  CHECK(m.keeps(0, 0));
  CHECK(m.keeps(0, 1));
  CHECK(m.keeps(1, 0));
  CHECK_FALSE(m.keeps(1, 1));
}

TEST_CASE("mask agrees with exact integer enumeration") {
  for (std::size_t h = 1; h <= 16; h += 3) {
    for (std::size_t w = 1; w <= 16; w += 5) {
      for (std::uint64_t num = 1; num < 10; ++num) {
        const LowPassMask m(h, w, static_cast<double>(num) / 10.0);
        const auto expected = oracle::mask_by_enumeration(h, w, num, 10);
        std::size_t matched = 0;
        for (const auto& [u, v] : expected) matched += m.keeps(u, v) ? 1 : 0;
        CHECK(matched == expected.size());
        CHECK(m.kept_count() == expected.size());
      }
    }
  }
}

TEST_CASE("mask invariants: DC kept, monotone, tau range") {
  for (double tau : {1e-9, 0.05, 0.3, 0.5, 0.999999}) {
    for (std::size_t n : {1u, 3u, 8u, 13u}) {
      const LowPassMask m(n, n + 2, tau);
      CHECK(m.keeps(0, 0));
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n + 2; ++v) {
          if (!m.keeps(u, v)) continue;
          for (std::size_t a = 0; a <= u; ++a) {
            for (std::size_t b = 0; b <= v; ++b) CHECK(m.keeps(a, b));
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(LowPassMask(4, 4, 0.0), ValidationError);
  CHECK_THROWS_AS(LowPassMask(4, 4, 1.0), ValidationError);
  CHECK_THROWS_AS(LowPassMask(4, 4, 1.5), ValidationError);
  CHECK_THROWS_AS(LowPassMask(4, 4, std::nan("")), ValidationError);
}

TEST_CASE("apply_mask") {
  Rng rng(4);
  const Spectrum f = dct2(random_tensor(Shape{3, 6, 6}, rng));

  SUBCASE("a mask that keeps everything is the identity") {
    CHECK(apply_mask(f, LowPassMask(6, 6, 0.99)) == f);
  }
  SUBCASE("a DC-only mask leaves one coefficient per channel") {
    const Spectrum g = apply_mask(f, LowPassMask(6, 6, 0.01));
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(g(c, 0, 0) == f(c, 0, 0));
      double rest = 0.0;
      for (double v : g.channel(c)) rest += v * v;
      CHECK(rest == doctest::Approx(f(c, 0, 0) * f(c, 0, 0)));
    }
  }
  SUBCASE("masking is idempotent and never adds energy") {
    const LowPassMask m(6, 6, 0.3);
    const Spectrum g = apply_mask(f, m);
    CHECK(apply_mask(g, m) == g);
    CHECK(g.energy() < f.energy());
    Spectrum low(f.shape());
    for (std::size_t c = 0; c < 3; ++c) low(c, 0, 1) = 2.0;
    CHECK(apply_mask(low, m).energy() == low.energy());
  }
  SUBCASE("shape mismatch is rejected") {
    CHECK_THROWS_AS(apply_mask(f, LowPassMask(6, 5, 0.3)), ValidationError);
  }
}

TEST_CASE("tensor construction checks") {
  CHECK_THROWS_AS(FeatureTensor(Shape{0, 2, 2}), ValidationError);
  CHECK_THROWS_AS(FeatureTensor(Shape{1, 2, 2}, {1, 2, 3}), ValidationError);
  FeatureTensor x(Shape{2, 2, 2});
  x(1, 0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(require_finite(x, "sample"), doctest::Contains("(1, 0, 1)"),
                       ValidationError);
}
