#include "cwrank/network.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "cwrank/error.h"

namespace cwrank {
namespace {

constexpr std::array<std::string_view, 5> kVariantNames = {
    "singleton", "multi", "multi+any", "any", "singleton+any"};

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

}  // namespace

std::string_view variant_name(Variant v) {
  return kVariantNames[static_cast<std::size_t>(v)];
}

std::optional<Variant> parse_variant(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '_', '+');
  for (std::size_t i = 0; i < kVariantNames.size(); ++i)
    if (kVariantNames[i] == key) return static_cast<Variant>(i);
  return std::nullopt;
}

bool variant_needs_target(Variant v) {
  return v == Variant::kSingleton || v == Variant::kSingletonAny;
}

TaskSet TaskSet::make(Variant v, std::optional<Source> target) {
  if (target && *target == Source::ANY)
    throw ConfigError("ANY cannot be a target source");
  if (variant_needs_target(v) && !target)
    throw ConfigError("variant " + std::string(variant_name(v)) +
                      " needs one of the nine sources as target");
  TaskSet ts;
  ts.variant = v;
  switch (v) {
    case Variant::kSingleton:
      ts.target = target;
      ts.tasks = {*target};
      break;
    case Variant::kSingletonAny:
      ts.target = target;
      ts.tasks = {*target, Source::ANY};
      break;
    case Variant::kAny:
      ts.target = target;
      ts.tasks = {Source::ANY};
      break;
    case Variant::kMulti:
      ts.tasks.assign(kRealSources.begin(), kRealSources.end());
      break;
    case Variant::kMultiAny:
      ts.tasks.assign(kRealSources.begin(), kRealSources.end());
      ts.tasks.push_back(Source::ANY);
      break;
  }
  return ts;
}

TaskSet TaskSet::multi_without(Source removed) {
  TaskSet ts = make(Variant::kMulti);
  std::erase(ts.tasks, removed);
  return ts;
}

std::optional<std::size_t> TaskSet::head_for(Source s) const {
  if (variant == Variant::kAny) return 0;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i] == s) return i;
  return std::nullopt;
}

std::string TaskSet::label() const {
  std::string out(variant_name(variant));
  if (target) out += "[" + std::string(source_name(*target)) + "]";
  if (variant == Variant::kMulti && tasks.size() != kNumSources) {
    for (Source s : kRealSources)
      if (!head_for(s)) out += "-" + std::string(source_name(s));
  }
  return out;
}

std::size_t NetworkDims::parameter_count() const {
  return shared * (input + 1) + tasks * (task_hidden * (shared + 2) + 1);
}

ParameterLayout::ParameterLayout(const NetworkDims& dims)
    : dims_(dims),
      shared_size_(dims.shared * (dims.input + 1)),
      task_size_(dims.task_hidden * (dims.shared + 2) + 1) {}

MtlNetwork::MtlNetwork(NetworkDims dims, TaskSet tasks)
    : dims_(dims), tasks_(std::move(tasks)), layout_(dims_) {
  if (dims_.tasks != tasks_.size())
    throw ConfigError("network dims disagree with the task set");
  if (dims_.input == 0 || dims_.shared == 0 || dims_.task_hidden == 0)
    throw ConfigError("network layer sizes must be positive");
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims_.parameter_count()));
}

ForwardCache forward(const MtlNetwork& net, const Eigen::VectorXd& params,
                     const Eigen::MatrixXd& batch) {
  const ParameterLayout& L = net.layout();
  const std::size_t T = net.dims().tasks;
  ForwardCache c;
  c.shared_pre = batch * L.shared_weight(params).transpose();
  c.shared_pre.rowwise() += L.shared_bias(params).transpose();
  c.shared_act = c.shared_pre.cwiseMax(0.0);
  c.logits.resize(batch.rows(), static_cast<Eigen::Index>(T));
  c.task_pre.resize(T);
  c.task_act.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    c.task_pre[t] = c.shared_act * L.task_weight(params, t).transpose();
    c.task_pre[t].rowwise() += L.task_bias(params, t).transpose();
    c.task_act[t] = c.task_pre[t].cwiseMax(0.0);
    c.logits.col(static_cast<Eigen::Index>(t)) =
        (c.task_act[t] * L.output_weight(params, t)).array() +
        L.output_bias(params, t);
  }
  c.probs = sigmoid(c.logits);
  return c;
}

ForwardCache forward(const MtlNetwork& net, const Eigen::MatrixXd& batch) {
  return forward(net, net.parameters(), batch);
}

Eigen::VectorXd forward_one(const MtlNetwork& net, std::span<const double> x) {
  if (x.size() != net.dims().input)
    throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                " != network input dimension " +
                                std::to_string(net.dims().input));
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw std::invalid_argument("non-finite input at column " + std::to_string(i));
    row(0, static_cast<Eigen::Index>(i)) = x[i];
  }
  return forward(net, row).probs.row(0).transpose();
}

double loss(std::span<const double> probs, std::span<const double> labels,
            double positive_weight) {
  if (probs.size() != labels.size())
    throw std::invalid_argument("loss: probability and label counts differ");
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const double p = std::clamp(probs[t], kProbClamp, 1.0 - kProbClamp);
    const double y = labels[t];
    total -= positive_weight * y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total;
}

Gradient gradients(const MtlNetwork& net, const Eigen::VectorXd& params,
                   const Eigen::MatrixXd& batch, const Eigen::MatrixXd& labels,
                   double positive_weight) {
  const ParameterLayout& L = net.layout();
  const std::size_t T = net.dims().tasks;
  const Eigen::Index n = batch.rows();
  if (n == 0) throw std::invalid_argument("gradients: empty batch");
  if (labels.rows() != n || labels.cols() != static_cast<Eigen::Index>(T))
    throw std::invalid_argument("gradients: label matrix shape mismatch");

  ForwardCache c = forward(net, params, batch);
  Gradient g;
  g.values = Eigen::VectorXd::Zero(params.size());

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd p = c.probs.row(i).transpose();
    const Eigen::VectorXd y = labels.row(i).transpose();
    total += loss({p.data(), T}, {y.data(), T}, positive_weight);
  }
  g.mean_loss = total / static_cast<double>(n);

  // dLoss/dlogit for sigmoid + BCE, averaged over the batch.
  const Eigen::MatrixXd weight =
      (labels.array() * (positive_weight - 1.0) + 1.0).matrix();
  const Eigen::MatrixXd dlogit =
      (weight.array() * (c.probs - labels).array() / static_cast<double>(n))
          .matrix();

  Eigen::MatrixXd dshared = Eigen::MatrixXd::Zero(n, c.shared_act.cols());
  for (std::size_t t = 0; t < T; ++t) {
    const auto col = dlogit.col(static_cast<Eigen::Index>(t));
    L.output_bias(g.values, t) = col.sum();
    L.output_weight(g.values, t) = c.task_act[t].transpose() * col;
    Eigen::MatrixXd dtask = col * L.output_weight(params, t).transpose();
    dtask = dtask.cwiseProduct(
        (c.task_pre[t].array() > 0.0).cast<double>().matrix());
    L.task_weight(g.values, t) = dtask.transpose() * c.shared_act;
    L.task_bias(g.values, t) = dtask.colwise().sum().transpose();
    dshared.noalias() += dtask * L.task_weight(params, t);
  }
  dshared = dshared.cwiseProduct(
      (c.shared_pre.array() > 0.0).cast<double>().matrix());
  L.shared_weight(g.values) = dshared.transpose() * batch;
  L.shared_bias(g.values) = dshared.colwise().sum().transpose();
  return g;
}

Gradient gradients(const MtlNetwork& net, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& labels, double positive_weight) {
  return gradients(net, net.parameters(), batch, labels, positive_weight);
}

}  // namespace cwrank
