#include "cwrank/trainer.h"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cwrank/error.h"

namespace cwrank {
namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.epochs = 30;
  c.shared_hidden = 8;
  c.task_hidden = 4;
  c.batch_size = 8;
  return c;
}

// Two Gaussian clusters in 3-d; label 1 around +1, label 0 around -1.
struct Toy {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  std::vector<std::size_t> rows;
};

Toy toy(std::size_t n, std::size_t tasks = 1) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.3);
  Toy t{Eigen::MatrixXd(n, 3), Eigen::MatrixXd(n, tasks), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = i % 2 ? 1.0 : -1.0;
    for (int c = 0; c < 3; ++c) t.X(i, c) = sign + g(rng);
    t.Y.row(i).setConstant(i % 2 ? 1.0 : 0.0);
    t.rows.push_back(i);
  }
  return t;
}

TEST(TrainConfig, Defaults) {
  const TrainConfig c;
  EXPECT_EQ(c.epochs, 100u);
  EXPECT_EQ(c.shared_hidden, 300u);
  EXPECT_EQ(c.reruns, 3u);
  EXPECT_NO_THROW(c.validate());
  TrainConfig bad;
  bad.momentum = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.epochs = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Init, SameSeedSameNetwork) {
  const TaskSet ts = TaskSet::make(Variant::kMulti);
  const TrainConfig c;
  EXPECT_EQ(init_network(20, ts, c, 9).parameters(), init_network(20, ts, c, 9).parameters());
  EXPECT_NE(init_network(20, ts, c, 9).parameters(), init_network(20, ts, c, 10).parameters());
}

TEST(Init, ShapesAndGlorotBound) {
  const TaskSet ts = TaskSet::make(Variant::kMultiAny);
  const MtlNetwork net = init_network(40, ts, TrainConfig{}, 1);
  EXPECT_EQ(net.dims().tasks, 10u);
  const auto& p = net.parameters();
  const auto W1 = net.layout().shared_weight(p);
  EXPECT_EQ(W1.rows(), 300);
  EXPECT_EQ(W1.cols(), 40);
  EXPECT_LE(W1.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 340.0));
  EXPECT_GT(W1.cwiseAbs().maxCoeff(), 0.9 * std::sqrt(6.0 / 340.0));
  EXPECT_EQ(net.layout().shared_bias(p).norm(), 0.0);
  const auto W2 = net.layout().task_weight(p, 9);
  EXPECT_EQ(W2.rows(), 50);
  EXPECT_LE(W2.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 350.0));
  EXPECT_LE(net.layout().output_weight(p, 9).cwiseAbs().maxCoeff(), std::sqrt(6.0 / 51.0));
  EXPECT_EQ(net.layout().output_bias(p, 9), 0.0);
}

TEST(Init, DroppingATaskKeepsOtherHeads) {
  const TrainConfig c;
  const MtlNetwork full = init_network(12, TaskSet::make(Variant::kMulti), c, 5);
  const MtlNetwork less = init_network(12, TaskSet::multi_without(Source::CNN), c, 5);
  EXPECT_EQ(full.layout().shared_weight(full.parameters()),
            less.layout().shared_weight(less.parameters()));
  const std::size_t fc_full = *full.task_set().head_for(Source::FC);
  const std::size_t fc_less = *less.task_set().head_for(Source::FC);
  EXPECT_EQ(full.layout().task_weight(full.parameters(), fc_full),
            less.layout().task_weight(less.parameters(), fc_less));
}

TEST(Nesterov, ScalarHandIteration) {
  TrainConfig c;
  c.learning_rate = 0.1;
  c.momentum = 0.9;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, 2.0);
  sgd_nesterov_step(w, grad, v, c);
  EXPECT_NEAR(v[0], -0.2, 1e-15);
  EXPECT_NEAR(w[0], 0.8, 1e-15);
  sgd_nesterov_step(w, grad, v, c);
  EXPECT_NEAR(v[0], -0.38, 1e-15);
  EXPECT_NEAR(w[0], 0.42, 1e-15);
}

TEST(Nesterov, ZeroGradientZeroVelocity) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 0.7);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  sgd_nesterov_step(w, Eigen::VectorXd::Zero(3), v, TrainConfig{});
  EXPECT_EQ(w, Eigen::VectorXd::Constant(3, 0.7));
}

TEST(Nesterov, EmptyBufferIsPlainSgd) {
  TrainConfig c;
  c.learning_rate = 0.05;
  Eigen::VectorXd w(2), v = Eigen::VectorXd::Zero(2), g(2);
  w << 1.0, -1.0;
  g << 0.5, 2.0;
  sgd_nesterov_step(w, g, v, c);
  EXPECT_DOUBLE_EQ(w[0], 1.0 - 0.05 * 0.5);
  EXPECT_DOUBLE_EQ(w[1], -1.0 - 0.05 * 2.0);
}

TEST(Train, DefaultRunsHundredEpochs) {
  const Toy t = toy(16);
  TrainConfig c = small_config();
  c.epochs = TrainConfig{}.epochs;
  MtlNetwork net = init_network(3, TaskSet::make(Variant::kSingleton, Source::CT), c, 1);
  const TrainResult r = train(net, t.X, t.Y, t.rows, c, 1);
  EXPECT_EQ(r.epoch_loss.size(), 100u);
  EXPECT_EQ(r.steps, 200u);
}

TEST(Train, LossDecreasesAndRanksClusters) {
  const Toy t = toy(64);
  const TrainConfig c = small_config();
  MtlNetwork net = init_network(3, TaskSet::make(Variant::kSingleton, Source::CT), c, 3);
  const TrainResult r = train(net, t.X, t.Y, t.rows, c, 3);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
  const std::vector<std::size_t> probe = {0, 1};  // negative, positive
  const auto scores = predict(net, t.X, probe, Source::CT);
  EXPECT_GT(scores[1], scores[0]);
}

TEST(Train, Deterministic) {
  const Toy t = toy(40, 9);
  const TrainConfig c = small_config();
  const TaskSet ts = TaskSet::make(Variant::kMulti);
  MtlNetwork a = init_network(3, ts, c, 8), b = init_network(3, ts, c, 8);
  const TrainResult ra = train(a, t.X, t.Y, t.rows, c, 8);
  const TrainResult rb = train(b, t.X, t.Y, t.rows, c, 8);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_EQ(ra.epoch_loss, rb.epoch_loss);
}

TEST(Train, DivergenceIsTrainingError) {
  Toy t = toy(16);
  t.X *= 1e200;
  TrainConfig c = small_config();
  c.learning_rate = 1e6;
  MtlNetwork net = init_network(3, TaskSet::make(Variant::kSingleton, Source::CT), c, 1);
  EXPECT_THROW(train(net, t.X, t.Y, t.rows, c, 1), TrainingError);
}

TEST(Predict, ZeroNetworkScoresOneHalf) {
  const TaskSet ts = TaskSet::make(Variant::kMulti);
  const MtlNetwork net({3, 4, 2, ts.size()}, ts);
  const Toy t = toy(4);
  for (double s : predict(net, t.X, t.rows, Source::TG)) EXPECT_EQ(s, 0.5);
  EXPECT_THROW(predict(net, t.X, t.rows, Source::ANY), ConfigError);
}

TEST(Predict, HeadsAreIndependent) {
  const Toy t = toy(10);
  const TaskSet ts = TaskSet::make(Variant::kMulti);
  MtlNetwork net = init_network(3, ts, small_config(), 4);
  const auto before = predict(net, t.X, t.rows, Source::CT);
  const std::size_t u = *ts.head_for(Source::WP);
  net.layout().task_weight(net.parameters(), u).array() += 0.5;
  net.layout().output_bias(net.parameters(), u) += 1.0;
  EXPECT_EQ(predict(net, t.X, t.rows, Source::CT), before);
  EXPECT_NE(predict(net, t.X, t.rows, Source::WP), before);
}

TEST(Checkpoint, RoundTripIsExact) {
  const TaskSet ts = TaskSet::make(Variant::kSingletonAny, Source::NYT);
  const MtlNetwork net = init_network(6, ts, small_config(), 2);
  std::stringstream buf;
  save_checkpoint(net, buf);
  const MtlNetwork back = load_checkpoint(buf);
  EXPECT_EQ(back.parameters(), net.parameters());
  EXPECT_EQ(back.task_set().tasks, ts.tasks);
  EXPECT_EQ(back.task_set().target, Source::NYT);
  EXPECT_EQ(back.dims().task_hidden, 4u);
}

TEST(Checkpoint, TruncatedIsParseError) {
  std::stringstream buf;
  save_checkpoint(init_network(2, TaskSet::make(Variant::kAny), small_config(), 1), buf);
  std::string text = buf.str();
  std::stringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_checkpoint(cut), ParseError);
}

TEST(History, Csv) {
  TrainResult r;
  r.epoch_loss = {0.5, 0.25};
  std::ostringstream out;
  write_history_csv(r, out);
  EXPECT_EQ(out.str(), "epoch,mean_loss\n1,0.5\n2,0.25\n");
}

}  // namespace
}  // namespace cwrank
