#include "cwrank/config.h"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cwrank/error.h"

namespace cwrank {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"paths", {"corpus", "annotations", "lexicons", "output"}},
    {"experiment", {"name", "variant", "target", "groups", "exclude_groups", "remove_source"}},
    {"train", {"epochs", "learning_rate", "momentum", "batch_size", "shared_hidden",
               "task_hidden", "positive_weight", "min_df"}},
    {"seeds", {"master", "reruns"}},
    {"run", {"jobs", "resume"}},
};

// Strict numeric lookups: the whole value must parse.
template <class T>
T number(const pt::ptree& tree, const std::string& key, T fallback) {
  auto raw = tree.get_optional<std::string>(key);
  if (!raw) return fallback;
  const std::string v = trim(*raw);
  T out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size())
    throw ConfigError("bad value '" + v + "' for " + key);
  return out;
}

bool flag(const pt::ptree& tree, const std::string& key, bool fallback) {
  auto raw = tree.get_optional<std::string>(key);
  if (!raw) return fallback;
  const std::string v = trim(*raw);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("bad value '" + v + "' for " + key);
}

}  // namespace

GroupSet parse_group_list(const std::string& list) {
  GroupSet groups;
  if (trim(list) == "all") return all_groups();
  std::istringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    auto g = parse_group(item);
    if (!g) throw ConfigError("unknown feature group '" + item + "'");
    groups.set(group_bit(*g));
  }
  return groups;
}

std::optional<Source> parse_target(const std::string& name) {
  if (name == "ALL" || name == "all") return std::nullopt;
  auto s = parse_source(name);
  if (!s || *s == Source::ANY) throw ConfigError("unknown target source '" + name + "'");
  return s;
}

RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir,
                           const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }

  for (const auto& [section, body] : tree) {
    auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end())
      throw ConfigError(origin + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      throw ConfigError(origin + ": key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!known->second.count(key))
        throw ConfigError(origin + ": unknown key '" + key + "' in [" + section + "]");
  }

  RunConfig cfg;
  auto path_of = [&](const std::string& key) -> std::filesystem::path {
    auto v = tree.get_optional<std::string>(key);
    if (!v || trim(*v).empty()) return {};
    std::filesystem::path p = trim(*v);
    return (p.is_absolute() ? p : base_dir / p).lexically_normal();
  };
  try {
    cfg.corpus = path_of("paths.corpus");
    cfg.annotations = path_of("paths.annotations");
    cfg.lexicons = path_of("paths.lexicons");
    if (auto out = path_of("paths.output"); !out.empty()) cfg.output_root = out;

    ExperimentSpec& spec = cfg.spec;
    spec.name = trim(tree.get<std::string>("experiment.name", spec.name));
    const std::string variant = trim(tree.get<std::string>("experiment.variant", "multi"));
    auto v = parse_variant(variant);
    if (!v) throw ConfigError("unknown variant '" + variant + "'");
    spec.variant = *v;
    spec.target = parse_target(trim(tree.get<std::string>("experiment.target", "ALL")));
    spec.groups = parse_group_list(tree.get<std::string>("experiment.groups", "all"));
    if (auto ex = tree.get_optional<std::string>("experiment.exclude_groups"))
      spec.groups &= ~parse_group_list(*ex);
    if (auto rm = tree.get_optional<std::string>("experiment.remove_source")) {
      if (!trim(*rm).empty()) {
        auto s = parse_target(trim(*rm));
        if (!s) throw ConfigError("remove_source must name a single source");
        spec.removed_source = s;
      }
    }

    TrainConfig& t = spec.train;
    t.epochs = number<std::size_t>(tree, "train.epochs", t.epochs);
    t.learning_rate = number<double>(tree, "train.learning_rate", t.learning_rate);
    t.momentum = number<double>(tree, "train.momentum", t.momentum);
    t.batch_size = number<std::size_t>(tree, "train.batch_size", t.batch_size);
    t.shared_hidden = number<std::size_t>(tree, "train.shared_hidden", t.shared_hidden);
    t.task_hidden = number<std::size_t>(tree, "train.task_hidden", t.task_hidden);
    t.positive_weight = number<double>(tree, "train.positive_weight", t.positive_weight);
    cfg.vocab.min_df = number<std::size_t>(tree, "train.min_df", cfg.vocab.min_df);
    t.seed = number<std::uint64_t>(tree, "seeds.master", t.seed);
    t.reruns = number<std::size_t>(tree, "seeds.reruns", t.reruns);
    spec.jobs = number<std::size_t>(tree, "run.jobs", spec.jobs);
    spec.resume = flag(tree, "run.resume", spec.resume);
    t.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path(), path.string());
}

}  // namespace cwrank
