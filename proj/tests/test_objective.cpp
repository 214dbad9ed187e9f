#include <doctest.h>

#include <Eigen/QR>
#include <numbers>

#include "fsnet/data_io.hpp"
#include "fsnet/error.hpp"
#include "fsnet/objective.hpp"
#include "fsnet/oracles.hpp"
#include "helpers.hpp"

using namespace fsnet;

namespace {

Eigen::MatrixXd random_orthonormal(std::size_t d, std::size_t k, Rng& rng) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

const SynthDataset& small_benchmark() {
  static const SynthDataset data = [] {
    SynthSpec spec;
    spec.classes = 16;
    spec.samples_per_class = 10;
    spec.channels = 8;
    spec.height = 6;
    spec.width = 6;
    spec.seed = 21;
    return generate_synthetic(spec);
  }();
  return data;
}

}  // namespace

TEST_CASE("cross entropy") {
  const std::vector<std::size_t> labels{0, 3, 4};
  CHECK(cross_entropy(Eigen::MatrixXd::Zero(3, 5), labels) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-14));

  Eigen::MatrixXd confident = Eigen::MatrixXd::Zero(3, 5);
  for (std::size_t i = 0; i < 3; ++i) confident(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 30.0;
  CHECK(cross_entropy(confident, labels) < 1e-11);

  Rng rng(1);
  Eigen::MatrixXd z = Eigen::MatrixXd::Random(3, 5) * 4.0;
  const double base = cross_entropy(z, labels);
  z.row(1).array() += 1234.5;
  CHECK(std::abs(cross_entropy(z, labels) - base) <= 1e-12);

  CHECK_THROWS_AS(cross_entropy(z, std::vector<std::size_t>{0, 1}), ValidationError);
  CHECK_THROWS_AS(cross_entropy(z, std::vector<std::size_t>{0, 1, 5}), ValidationError);
}

TEST_CASE("disc loss closed forms") {
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(4, 2);
  CHECK(disc_loss(std::vector<Eigen::MatrixXd>{p, p}) == doctest::Approx(4.0));

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 2);
  q(2, 0) = 1.0;
  q(3, 1) = 1.0;
  CHECK(disc_loss(std::vector<Eigen::MatrixXd>{p, q}) == 0.0);

  for (double theta = 0.0; theta < 2 * std::numbers::pi; theta += 0.37) {
    Eigen::MatrixXd a(2, 1), b(2, 1);
    a << 1.0, 0.0;
    b << std::cos(theta), std::sin(theta);
    CHECK(std::abs(disc_loss(std::vector<Eigen::MatrixXd>{a, b}) -
                   2.0 * std::cos(theta) * std::cos(theta)) <= 1e-10);
  }
}

TEST_CASE("disc loss properties") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<Eigen::MatrixXd> bases;
    for (int k = 0; k < 5; ++k) bases.push_back(random_orthonormal(10, 1 + rng() % 4, rng));
    const double value = disc_loss(bases);
    CHECK(value >= 0.0);
    // Pair terms are bounded by the smaller rank.
    for (std::size_t i = 0; i < bases.size(); ++i) {
      for (std::size_t j = 0; j < bases.size(); ++j) {
        if (i == j) continue;
        const double term = (bases[i].transpose() * bases[j]).squaredNorm();
        CHECK(term <= static_cast<double>(std::min(bases[i].cols(), bases[j].cols())) + 1e-12);
      }
    }
    std::vector<Eigen::MatrixXd> shuffled = bases;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(disc_loss(shuffled) - value) <= 1e-12);
  }
  CHECK_THROWS_AS(disc_loss(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Identity(3, 1),
                                                         Eigen::MatrixXd::Identity(4, 1)}),
                  ValidationError);
}

TEST_CASE("total loss breakdown") {
  const auto& data = small_benchmark();
  const ModelParams params = ModelParams::initial(8, 4, 1.0, 2);
  PipelineOptions po;
  for (std::uint64_t e = 0; e < 10; ++e) {
    Rng rng(e);
    const Episode ep = sample_episode(data.split, Phase::base, 5, 3, 4, rng);
    const LossBreakdown l = total_loss(ep, params, po, 0.03, e);
    CHECK(l.l_cls >= 0.0);
    CHECK(l.l_disc >= 0.0);
    CHECK(std::abs(l.l_total - (l.l_cls + 0.03 * l.l_disc)) <= 1e-12);
    const LossBreakdown off = total_loss(ep, params, po, 0.0, e);
    CHECK(off.l_total == off.l_cls);
  }
}

TEST_CASE("orthogonal class supports contribute no disc loss") {
  // Class k lives on coordinates {2k, 2k+1} of a 1x2x10 map: bases are mutually
  // orthogonal in the spatial view.
  Episode ep;
  ep.way = 5;
  ep.shot = 2;
  ep.queries = 1;
  for (std::size_t k = 0; k < 5; ++k) {
    ep.classes.push_back(k);
    for (std::size_t i = 0; i < 3; ++i) {
      FeatureTensor x(Shape{1, 2, 10});
      x.data()[2 * k] = 1.0 + static_cast<double>(i);
      x.data()[2 * k + 1] = static_cast<double>(i * i) - 1.0;
      auto& bucket = i < 2 ? ep.support : ep.query;
      (i < 2 ? ep.support_labels : ep.query_labels).push_back(k);
      (i < 2 ? ep.support_ids : ep.query_ids).push_back(3 * k + i);
      bucket.push_back(x);
    }
  }
  PipelineOptions po;
  po.variant = Variant::v0;
  po.jitter = 0.0;
  const LossBreakdown l = total_loss(ep, ModelParams::initial(1, 1, 1.0, 0), po, 0.03, 0);
  CHECK(l.l_disc <= 1e-20);
  CHECK(l.l_total == doctest::Approx(l.l_cls));
}

TEST_CASE("finite-difference gradient") {
  const auto& data = small_benchmark();
  ModelParams params = ModelParams::initial(8, 4, 2.0, 3);
  params.fusion.logits = {0.4, 1.1};

  SUBCASE("matches the analytic fusion gradient") {
    PipelineOptions po;
    for (std::uint64_t e = 0; e < 6; ++e) {
      Rng rng(100 + e);
      const Episode ep = sample_episode(data.split, Phase::base, 5, 2, 3, rng);
      const auto fd = fd_gradient(ep, params, po, 0.03, e, 1e-4);
      const auto exact = oracle::analytic_fusion_gradient(evaluate_episode(ep, params, po, e),
                                                          params.fusion, params.logit_scale);
      const std::size_t at = params.size() - 3;
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(fd[at + j] - exact[j]) <= 1e-4 * std::abs(exact[j]));
      }
    }
  }
  SUBCASE("coordinates the loss ignores get zero") {
    // V1 bypasses attention and fixes the fusion weights.
    PipelineOptions po;
    po.variant = Variant::v1;
    Rng rng(7);
    const Episode ep = sample_episode(data.split, Phase::base, 5, 2, 3, rng);
    const auto g = fd_gradient(ep, params, po, 0.03, 7, 1e-4);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(std::abs(g[i]) <= 1e-10);
    CHECK(std::abs(g.back()) > 1e-6);  // the logit scale still matters
  }
  SUBCASE("disc loss reaches the attention parameters") {
    PipelineOptions po;
    po.variant = Variant::v2;
    Rng rng(8);
    const Episode ep = sample_episode(data.split, Phase::base, 5, 3, 3, rng);
    // Difference of two lambdas isolates lambda * d(l_disc)/d(theta).
    const auto with = fd_gradient(ep, params, po, 1.0, 8, 1e-4);
    const auto without = fd_gradient(ep, params, po, 0.0, 8, 1e-4);
    double attention_norm = 0.0;
    for (Eigen::Index i = 0; i < params.attention.w1.size(); ++i) {
      attention_norm += std::abs(with[i] - without[i]);
    }
    CHECK(attention_norm > 1e-8);
  }
  CHECK_THROWS_AS(fd_gradient(Episode{}, params, PipelineOptions{}, 0.03, 0, 0.0), ValidationError);
}

TEST_CASE("training") {
  const auto& data = small_benchmark();
  const ModelParams init = ModelParams::initial(8, 4, 1.0, 4);
  TrainOptions o;
  o.shot = 1;
  o.queries = 3;
  o.seed = 5;

  SUBCASE("zero learning rate leaves parameters alone") {
    o.steps = 3;
    o.lr = 0.0;
    CHECK(train(data.split, init, o).params == init);
  }
  SUBCASE("same seed, same trace") {
    o.steps = 4;
    const TrainResult a = train(data.split, init, o);
    const TrainResult b = train(data.split, init, o);
    REQUIRE(a.trace.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.trace[i].l_total == b.trace[i].l_total);
    CHECK(a.params == b.params);
  }
  SUBCASE("loss goes down on separable data") {
    o.steps = 40;
    o.lr = 0.5;
    const TrainResult r = train(data.split, init, o);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      first += r.trace[i].l_total;
      last += r.trace[r.trace.size() - 1 - i].l_total;
    }
    CHECK(last < first);
  }
  SUBCASE("divergence is reported with the trace so far") {
    // Separable data only drives the scale up with the loss near zero; shuffled
    // labels make a huge scale expensive.
    o.steps = 20;
    o.lr = 1e9;
    try {
      train(data.split.with_shuffled_labels(1), init, o);
      FAIL("expected divergence");
    } catch (const TrainingDiverged& e) {
      CHECK_FALSE(e.trace().empty());
    } catch (const NumericalError&) {
      // a non-finite gradient coordinate is an acceptable way to blow up too
    }
  }
}
