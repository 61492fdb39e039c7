#ifndef CWRANK_NETWORK_H_
#define CWRANK_NETWORK_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "cwrank/source.h"

namespace cwrank {

enum class Variant { kSingleton, kMulti, kMultiAny, kAny, kSingletonAny };

std::string_view variant_name(Variant v);  // "singleton", "multi+any", ...
// Accepts the display names and underscore spellings ("multi_any").
std::optional<Variant> parse_variant(std::string_view name);
// singleton and singleton+any train one network per target source.
bool variant_needs_target(Variant v);

// The output heads a network carries, in head order.
struct TaskSet {
  Variant variant = Variant::kMulti;
  std::optional<Source> target;
  std::vector<Source> tasks;

  // Throws ConfigError when a target is required but absent, or is ANY.
  // Variant `any` takes an optional target; its single head is ANY.
  static TaskSet make(Variant v, std::optional<Source> target = std::nullopt);
  // The nine-source multi task set with `removed` left out.
  static TaskSet multi_without(Source removed);

  std::size_t size() const { return tasks.size(); }
  // Head that scores `s`. For variant `any` the single ANY head serves
  // every source.
  std::optional<std::size_t> head_for(Source s) const;
  std::string label() const;
};

struct NetworkDims {
  std::size_t input = 0;
  std::size_t shared = 300;
  std::size_t task_hidden = 50;
  std::size_t tasks = 0;

  std::size_t parameter_count() const;
};

// Offsets of each weight block inside the flat parameter vector. Gradient
// and velocity vectors share this layout. Matrices are column-major and
// stored as (fan_out x fan_in).
class ParameterLayout {
 public:
  explicit ParameterLayout(const NetworkDims& dims);

  template <class Vec>
  auto shared_weight(Vec& v) const {
    return matrix(v, 0, dims_.shared, dims_.input);
  }
  template <class Vec>
  auto shared_bias(Vec& v) const {
    return vector(v, dims_.shared * dims_.input, dims_.shared);
  }
  template <class Vec>
  auto task_weight(Vec& v, std::size_t t) const {
    return matrix(v, task_offset(t), dims_.task_hidden, dims_.shared);
  }
  template <class Vec>
  auto task_bias(Vec& v, std::size_t t) const {
    return vector(v, task_offset(t) + dims_.task_hidden * dims_.shared,
                  dims_.task_hidden);
  }
  template <class Vec>
  auto output_weight(Vec& v, std::size_t t) const {
    return vector(v, task_offset(t) + dims_.task_hidden * (dims_.shared + 1),
                  dims_.task_hidden);
  }
  template <class Vec>
  auto& output_bias(Vec& v, std::size_t t) const {
    return v[static_cast<Eigen::Index>(task_offset(t) +
                                       dims_.task_hidden * (dims_.shared + 2))];
  }

  // [begin, end) of the block owned by head t / by the shared layer.
  std::size_t task_offset(std::size_t t) const {
    return shared_size_ + t * task_size_;
  }
  std::size_t task_block_size() const { return task_size_; }
  std::size_t shared_block_size() const { return shared_size_; }

 private:
  template <class Vec>
  static auto matrix(Vec& v, std::size_t off, std::size_t rows, std::size_t cols) {
    using M = std::conditional_t<std::is_const_v<Vec>, const Eigen::MatrixXd,
                                 Eigen::MatrixXd>;
    return Eigen::Map<M>(v.data() + off, static_cast<Eigen::Index>(rows),
                         static_cast<Eigen::Index>(cols));
  }
  template <class Vec>
  static auto vector(Vec& v, std::size_t off, std::size_t size) {
    using M = std::conditional_t<std::is_const_v<Vec>, const Eigen::VectorXd,
                                 Eigen::VectorXd>;
    return Eigen::Map<M>(v.data() + off, static_cast<Eigen::Index>(size));
  }

  NetworkDims dims_;
  std::size_t shared_size_;
  std::size_t task_size_;
};

// Hard parameter sharing: input -> shared ReLU layer -> one ReLU layer per
// task -> one sigmoid unit per task.
class MtlNetwork {
 public:
  MtlNetwork(NetworkDims dims, TaskSet tasks);  // all parameters zero

  const NetworkDims& dims() const { return dims_; }
  const TaskSet& task_set() const { return tasks_; }
  const ParameterLayout& layout() const { return layout_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

 private:
  NetworkDims dims_;
  TaskSet tasks_;
  ParameterLayout layout_;
  Eigen::VectorXd params_;
};

// Activations of a batch (one row per example).
struct ForwardCache {
  Eigen::MatrixXd shared_pre;
  Eigen::MatrixXd shared_act;
  std::vector<Eigen::MatrixXd> task_pre;
  std::vector<Eigen::MatrixXd> task_act;
  Eigen::MatrixXd logits;  // rows x tasks
  Eigen::MatrixXd probs;   // rows x tasks
};

// Uses `params` (same layout as net) instead of the network's own weights,
// which lets the trainer evaluate look-ahead points without copying.
ForwardCache forward(const MtlNetwork& net, const Eigen::VectorXd& params,
                     const Eigen::MatrixXd& batch);
ForwardCache forward(const MtlNetwork& net, const Eigen::MatrixXd& batch);

// Per-task probabilities for a single input. Throws std::invalid_argument on
// a wrong length or non-finite values.
Eigen::VectorXd forward_one(const MtlNetwork& net, std::span<const double> x);

inline constexpr double kProbClamp = 1e-7;

// Sum over tasks of binary cross-entropy; probabilities are clamped to
// [1e-7, 1 - 1e-7]. Positive labels are weighted by `positive_weight`.
double loss(std::span<const double> probs, std::span<const double> labels,
            double positive_weight = 1.0);

struct Gradient {
  Eigen::VectorXd values;  // ParameterLayout order
  double mean_loss = 0.0;
};

// Mean-over-batch gradient of the summed task losses at `params`.
Gradient gradients(const MtlNetwork& net, const Eigen::VectorXd& params,
                   const Eigen::MatrixXd& batch, const Eigen::MatrixXd& labels,
                   double positive_weight = 1.0);
Gradient gradients(const MtlNetwork& net, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& labels, double positive_weight = 1.0);

}  // namespace cwrank

#endif  // CWRANK_NETWORK_H_
