#include "cwrank/network.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cwrank/error.h"
#include "cwrank/trainer.h"

namespace cwrank {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Plain-loop forward pass and mean summed BCE, written against the block
// layout only. Serves as the finite-difference oracle.
double reference_loss(const MtlNetwork& net, const Eigen::VectorXd& p,
                      const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const NetworkDims& d = net.dims();
  const ParameterLayout& L = net.layout();
  const auto W1 = L.shared_weight(p);
  const auto b1 = L.shared_bias(p);
  double total = 0.0;
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    std::vector<double> h(d.shared);
    for (std::size_t j = 0; j < d.shared; ++j) {
      double z = b1[j];
      for (std::size_t i = 0; i < d.input; ++i) z += W1(j, i) * X(n, i);
      h[j] = std::max(0.0, z);
    }
    for (std::size_t t = 0; t < d.tasks; ++t) {
      const auto W2 = L.task_weight(p, t);
      const auto b2 = L.task_bias(p, t);
      const auto w3 = L.output_weight(p, t);
      double logit = L.output_bias(p, t);
      for (std::size_t k = 0; k < d.task_hidden; ++k) {
        double z = b2[k];
        for (std::size_t j = 0; j < d.shared; ++j) z += W2(k, j) * h[j];
        logit += w3[k] * std::max(0.0, z);
      }
      const double q = std::clamp(sigmoid(logit), 1e-7, 1.0 - 1e-7);
      const double y = Y(n, t);
      total += -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
    }
  }
  return total / static_cast<double>(X.rows());
}

MtlNetwork random_net(std::mt19937_64& rng, std::size_t in, std::size_t shared,
                      std::size_t task_hidden, Variant v = Variant::kMulti) {
  TaskSet ts = v == Variant::kMulti ? TaskSet::make(v) : TaskSet::make(v, Source::CT);
  MtlNetwork net({in, shared, task_hidden, ts.size()}, ts);
  std::normal_distribution<double> g(0.0, 0.7);
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) net.parameters()[i] = g(rng);
  return net;
}

TEST(TaskSet, Variants) {
  EXPECT_EQ(TaskSet::make(Variant::kMulti).size(), 9u);
  const TaskSet ma = TaskSet::make(Variant::kMultiAny);
  EXPECT_EQ(ma.size(), 10u);
  EXPECT_EQ(ma.tasks.back(), Source::ANY);
  EXPECT_EQ(TaskSet::make(Variant::kSingleton, Source::NYT).tasks,
            std::vector<Source>{Source::NYT});
  EXPECT_EQ(TaskSet::make(Variant::kSingletonAny, Source::PF).tasks,
            (std::vector<Source>{Source::PF, Source::ANY}));
  const TaskSet any = TaskSet::make(Variant::kAny);
  EXPECT_EQ(any.tasks, std::vector<Source>{Source::ANY});
  EXPECT_EQ(any.head_for(Source::WP), 0u);
  EXPECT_THROW(TaskSet::make(Variant::kSingleton), ConfigError);
  EXPECT_THROW(TaskSet::make(Variant::kSingleton, Source::ANY), ConfigError);
  const TaskSet no_nyt = TaskSet::multi_without(Source::NYT);
  EXPECT_EQ(no_nyt.size(), 8u);
  EXPECT_FALSE(no_nyt.head_for(Source::NYT));
  EXPECT_EQ(no_nyt.label(), "multi-NYT");
}

TEST(Variant, NamesRoundTrip) {
  for (Variant v : {Variant::kSingleton, Variant::kMulti, Variant::kMultiAny, Variant::kAny,
                    Variant::kSingletonAny})
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_EQ(parse_variant("multi_any"), Variant::kMultiAny);
  EXPECT_FALSE(parse_variant("both"));
}

TEST(Forward, ZeroNetworkGivesOneHalf) {
  const TaskSet ts = TaskSet::make(Variant::kMultiAny);
  const MtlNetwork net({4, 6, 3, ts.size()}, ts);
  const Eigen::VectorXd p = forward_one(net, std::vector<double>{1, -2, 3, 0.5});
  ASSERT_EQ(p.size(), 10);
  for (Eigen::Index t = 0; t < p.size(); ++t) EXPECT_EQ(p[t], 0.5);
}

TEST(Forward, OneDimensionalComposition) {
  const TaskSet ts = TaskSet::make(Variant::kSingleton, Source::CT);
  MtlNetwork net({1, 1, 1, 1}, ts);
  auto& p = net.parameters();
  const auto& L = net.layout();
  L.shared_weight(p)(0, 0) = 1.0;
  L.task_weight(p, 0)(0, 0) = 1.0;
  L.output_weight(p, 0)[0] = 1.0;
  EXPECT_NEAR(forward_one(net, std::vector<double>{2.0})[0], 0.8808, 1e-4);
  EXPECT_DOUBLE_EQ(forward_one(net, std::vector<double>{2.0})[0], sigmoid(2.0));
  // Negative pre-activation is cut by the ReLU.
  EXPECT_EQ(forward_one(net, std::vector<double>{-3.0})[0], 0.5);
  const ForwardCache c = forward(net, Eigen::MatrixXd::Constant(1, 1, -3.0));
  EXPECT_EQ(c.shared_pre(0, 0), -3.0);
  EXPECT_EQ(c.shared_act(0, 0), 0.0);
}

TEST(Forward, RejectsBadInput) {
  const TaskSet ts = TaskSet::make(Variant::kMulti);
  const MtlNetwork net({2, 3, 2, ts.size()}, ts);
  EXPECT_THROW(forward_one(net, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(forward_one(net, std::vector<double>{1.0, NAN}), std::invalid_argument);
}

TEST(Loss, KnownValues) {
  EXPECT_NEAR(loss(std::vector<double>{0.5}, std::vector<double>{1.0}), 0.6931, 1e-4);
  EXPECT_NEAR(loss(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), 1.3863,
              1e-4);
  EXPECT_DOUBLE_EQ(loss(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}),
                   2.0 * std::log(2.0));
  EXPECT_LE(loss(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}), 4e-7);
  EXPECT_DOUBLE_EQ(loss(std::vector<double>{0.5}, std::vector<double>{1.0}, 3.0),
                   3.0 * std::log(2.0));
}

TEST(Gradients, OutputBiasIsMeanResidual) {
  std::mt19937_64 rng(5);
  const MtlNetwork net = random_net(rng, 4, 5, 3);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(7, 4);
  Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(7, 9).array() > 0).cast<double>();
  const Gradient g = gradients(net, X, Y);
  const ForwardCache c = forward(net, X);
  for (std::size_t t = 0; t < 9; ++t) {
    const double expected = (c.probs.col(t) - Y.col(t)).mean();
    EXPECT_NEAR(net.layout().output_bias(g.values, t), expected, 1e-12);
  }
  EXPECT_NEAR(g.mean_loss, reference_loss(net, net.parameters(), X, Y), 1e-12);
}

TEST(Gradients, StationaryAtPerfectFit) {
  const TaskSet ts = TaskSet::make(Variant::kSingleton, Source::CT);
  MtlNetwork net({1, 1, 1, 1}, ts);
  auto& p = net.parameters();
  const auto& L = net.layout();
  L.shared_weight(p)(0, 0) = 1.0;
  L.task_weight(p, 0)(0, 0) = 1.0;
  L.output_weight(p, 0)[0] = 100.0;
  L.output_bias(p, 0) = -50.0;
  Eigen::MatrixXd X(2, 1), Y(2, 1);
  X << 1.0, 0.0;
  Y << 1.0, 0.0;
  EXPECT_LE(gradients(net, X, Y).values.norm(), 1e-6);
}

TEST(Gradients, MatchCentralDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const MtlNetwork net = random_net(rng, 5, 4, 3, Variant::kSingletonAny);
    ASSERT_EQ(net.dims().tasks, 2u);
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(6, 5);
    Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(6, 2).array() > 0).cast<double>();
    const Gradient g = gradients(net, X, Y);
    Eigen::VectorXd p = net.parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + 1e-5;
      const double up = reference_loss(net, p, X, Y);
      p[i] = keep - 1e-5;
      const double down = reference_loss(net, p, X, Y);
      p[i] = keep;
      const double fd = (up - down) / 2e-5;
      EXPECT_LE(std::abs(fd - g.values[i]), 1e-4 * std::max(1.0, std::abs(fd))) << i;
    }
  }
}

TEST(Gradients, SharedGradientSumsTaskContributions) {
  std::mt19937_64 rng(3);
  const MtlNetwork net = random_net(rng, 3, 4, 2);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
  Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(5, 9).array() > 0).cast<double>();
  const Gradient all = gradients(net, X, Y);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(all.values.size());
  for (std::size_t t = 0; t < 9; ++t) {
    // Labels equal to the predictions zero out every task but t.
    Eigen::MatrixXd Yt = forward(net, X).probs;
    Yt.col(t) = Y.col(t);
    sum += gradients(net, X, Yt).values;
  }
  const auto& L = net.layout();
  const Eigen::Index shared = static_cast<Eigen::Index>(L.shared_block_size());
  EXPECT_LE((all.values.head(shared) - sum.head(shared)).norm(), 1e-9);
}

}  // namespace
}  // namespace cwrank
