#ifndef CWRANK_TRAINER_H_
#define CWRANK_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cwrank/network.h"

namespace cwrank {

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  std::size_t reruns = 3;
  std::size_t shared_hidden = 300;
  std::size_t task_hidden = 50;
  double positive_weight = 1.0;

  void validate() const;  // throws ConfigError
};

// Deterministic 64-bit seed mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Glorot-uniform weights, zero biases. Each layer draws from its own stream
// derived from (seed, layer), and a task head's stream depends only on its
// source, so dropping a task leaves every other head's initial weights
// unchanged.
MtlNetwork init_network(std::size_t input_dim, const TaskSet& tasks,
                        const TrainConfig& config, std::uint64_t seed);

// Nesterov momentum with the gradient taken at the look-ahead point w + mu*v:
//   v <- mu*v - lr*grad;  w <- w + v
void sgd_nesterov_step(Eigen::VectorXd& params,
                       const Eigen::VectorXd& grad_at_lookahead,
                       Eigen::VectorXd& velocity, const TrainConfig& config);

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-example loss, one per epoch
  std::size_t steps = 0;
};

// Trains in place on `rows` of `features` (labels has one row per feature
// row, one column per task). Minibatch order is reshuffled every epoch from
// a generator seeded with `seed`. Throws TrainingError on a non-finite loss.
TrainResult train(MtlNetwork& net, const Eigen::MatrixXd& features,
                  const Eigen::MatrixXd& labels, std::span<const std::size_t> rows,
                  const TrainConfig& config, std::uint64_t seed);

// Probability for `task` on each of `rows`. Throws ConfigError if the network
// has no head for the task.
std::vector<double> predict(const MtlNetwork& net, const Eigen::MatrixXd& features,
                            std::span<const std::size_t> rows, Source task);

// Text checkpoint; parameters are written as hex floats so reloading is exact.
void save_checkpoint(const MtlNetwork& net, std::ostream& out);
MtlNetwork load_checkpoint(std::istream& in);

// "epoch,mean_loss" CSV.
void write_history_csv(const TrainResult& result, std::ostream& out);

}  // namespace cwrank

#endif  // CWRANK_TRAINER_H_
