#include "cwrank/trainer.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "cwrank/error.h"

namespace cwrank {
namespace {

constexpr std::uint64_t kSharedStream = 0x5ead;
constexpr std::uint64_t kShuffleStream = 0x5ff1e;
constexpr std::uint64_t kHeadStreamBase = 0x4ead00;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Block>
void glorot_fill(Block&& w, std::mt19937_64& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  // Column-major traversal keeps the draw order fixed.
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      w(i, j) = (2.0 * uniform01(rng) - 1.0) * bound;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ConfigError("momentum must lie in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (reruns < 1) throw ConfigError("reruns must be >= 1");
  if (shared_hidden < 1 || task_hidden < 1)
    throw ConfigError("hidden layer sizes must be >= 1");
  if (!(positive_weight > 0.0)) throw ConfigError("positive_weight must be > 0");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MtlNetwork init_network(std::size_t input_dim, const TaskSet& tasks,
                        const TrainConfig& config, std::uint64_t seed) {
  NetworkDims dims{input_dim, config.shared_hidden, config.task_hidden,
                   tasks.size()};
  MtlNetwork net(dims, tasks);
  auto& p = net.parameters();
  const ParameterLayout& L = net.layout();

  std::mt19937_64 shared_rng(mix_seed(seed, kSharedStream));
  glorot_fill(L.shared_weight(p), shared_rng);

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::mt19937_64 rng(mix_seed(seed, kHeadStreamBase + column(tasks.tasks[t])));
    glorot_fill(L.task_weight(p, t), rng);
    auto out = L.output_weight(p, t);
    Eigen::Map<Eigen::MatrixXd> out_row(out.data(), 1, out.size());
    glorot_fill(out_row, rng);
  }
  return net;
}

void sgd_nesterov_step(Eigen::VectorXd& params,
                       const Eigen::VectorXd& grad_at_lookahead,
                       Eigen::VectorXd& velocity, const TrainConfig& config) {
  if (params.size() != grad_at_lookahead.size() || params.size() != velocity.size())
    throw std::invalid_argument("sgd_nesterov_step: shape mismatch");
  velocity = config.momentum * velocity - config.learning_rate * grad_at_lookahead;
  params += velocity;
}

TrainResult train(MtlNetwork& net, const Eigen::MatrixXd& features,
                  const Eigen::MatrixXd& labels, std::span<const std::size_t> rows,
                  const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  if (features.rows() != labels.rows())
    throw std::invalid_argument("train: features and labels are not aligned");
  if (labels.cols() != static_cast<Eigen::Index>(net.dims().tasks))
    throw std::invalid_argument("train: label columns != task count");
  if (rows.empty()) throw std::invalid_argument("train: no training rows");

  std::vector<Eigen::Index> order(rows.begin(), rows.end());
  std::mt19937_64 rng(mix_seed(seed, kShuffleStream));
  Eigen::VectorXd& w = net.parameters();
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(w.size());
  Eigen::VectorXd lookahead(w.size());

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng() % (i + 1)]);

    double epoch_total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      const Eigen::MatrixXd xb = features(idx, Eigen::all);
      const Eigen::MatrixXd yb = labels(idx, Eigen::all);

      lookahead = w + config.momentum * velocity;
      Gradient g = gradients(net, lookahead, xb, yb, config.positive_weight);
      if (!std::isfinite(g.mean_loss) || !g.values.allFinite()) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                            ", step " + std::to_string(result.steps + 1) +
                            " (task set " + net.task_set().label() + ")");
      }
      sgd_nesterov_step(w, g.values, velocity, config);
      epoch_total += g.mean_loss * static_cast<double>(end - begin);
      ++result.steps;
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(order.size()));
  }
  return result;
}

std::vector<double> predict(const MtlNetwork& net, const Eigen::MatrixXd& features,
                            std::span<const std::size_t> rows, Source task) {
  const auto head = net.task_set().head_for(task);
  if (!head)
    throw ConfigError("network " + net.task_set().label() + " has no head for " +
                      std::string(source_name(task)));
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  const Eigen::MatrixXd x = features(idx, Eigen::all);
  const ForwardCache c = forward(net, x);
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[i] = c.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*head));
  return out;
}

void save_checkpoint(const MtlNetwork& net, std::ostream& out) {
  const auto& d = net.dims();
  const auto& ts = net.task_set();
  out << "cwrank-mtl 1\n";
  out << "variant " << variant_name(ts.variant) << '\n';
  out << "target " << (ts.target ? source_name(*ts.target) : "-") << '\n';
  out << "tasks";
  for (Source s : ts.tasks) out << ' ' << source_name(s);
  out << '\n';
  out << "dims " << d.input << ' ' << d.shared << ' ' << d.task_hidden << '\n';
  out << "params " << net.parameters().size() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%a\n", net.parameters()[i]);
    out << buf;
  }
}

MtlNetwork load_checkpoint(std::istream& in) {
  auto expect_line = [&](const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("checkpoint truncated before '" + key + "'");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw ParseError("checkpoint: expected '" + key + "', got '" + k + "'");
    std::string rest;
    std::getline(ls, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return rest;
  };
  if (expect_line("cwrank-mtl") != "1") throw ParseError("unsupported checkpoint version");

  TaskSet ts;
  const auto variant = parse_variant(expect_line("variant"));
  if (!variant) throw ParseError("checkpoint: unknown variant");
  ts.variant = *variant;
  const std::string target = expect_line("target");
  if (target != "-") {
    ts.target = parse_source(target);
    if (!ts.target) throw ParseError("checkpoint: unknown target " + target);
  }
  std::istringstream tasks(expect_line("tasks"));
  for (std::string name; tasks >> name;) {
    auto s = parse_source(name);
    if (!s) throw ParseError("checkpoint: unknown task " + name);
    ts.tasks.push_back(*s);
  }
  NetworkDims d;
  std::istringstream dims(expect_line("dims"));
  if (!(dims >> d.input >> d.shared >> d.task_hidden))
    throw ParseError("checkpoint: bad dims line");
  d.tasks = ts.tasks.size();
  MtlNetwork net(d, ts);
  const long long count = std::stoll(expect_line("params"));
  if (count != net.parameters().size())
    throw ParseError("checkpoint: parameter count does not match dims");
  std::string line;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("checkpoint: truncated parameters");
    char* end = nullptr;
    net.parameters()[i] = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw ParseError("checkpoint: bad number '" + line + "'");
  }
  return net;
}

void write_history_csv(const TrainResult& result, std::ostream& out) {
  out << "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, result.epoch_loss[e]);
    out << buf;
  }
}

}  // namespace cwrank
