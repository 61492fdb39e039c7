#include "cwrank/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cwrank/error.h"

namespace cwrank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(const std::string& s) {
    add(s.data(), s.size());
    add("\x1f", 1);
  }
  std::string hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hexfloat(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ParseError("bad number '" + s + "'");
  return v;
}

Eigen::MatrixXd unit_labels(const Corpus& corpus, const TaskSet& unit) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(corpus.num_sentences()),
                    static_cast<Eigen::Index>(unit.size()));
  for (std::size_t r = 0; r < corpus.num_sentences(); ++r) {
    const Sentence& s = corpus.row(r);
    for (std::size_t t = 0; t < unit.size(); ++t)
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) =
          s.label(unit.tasks[t]) ? 1.0 : 0.0;
  }
  return y;
}

std::string matrix_digest(const Eigen::MatrixXd& m) {
  Fnv1a h;
  const Eigen::Index dims[2] = {m.rows(), m.cols()};
  h.add(dims, sizeof dims);
  h.add(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  return h.hex();
}

struct CellOutput {
  std::vector<double> epoch_loss;
  std::vector<std::vector<double>> head_scores;  // [head][test row]
};

void save_cell(const std::filesystem::path& path, const std::string& fingerprint,
               const CellOutput& cell) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << "cwrank-cell 1\nfingerprint " << fingerprint << '\n';
    out << "history " << cell.epoch_loss.size() << '\n';
    for (double v : cell.epoch_loss) out << hexfloat(v) << '\n';
    out << "heads " << cell.head_scores.size() << '\n';
    for (const auto& head : cell.head_scores) {
      out << "head " << head.size() << '\n';
      for (double v : head) out << hexfloat(v) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<CellOutput> load_cell(const std::filesystem::path& path,
                                    const std::string& fingerprint,
                                    std::size_t heads, std::size_t rows) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string tag, value;
  in >> tag >> value;
  if (tag != "cwrank-cell" || value != "1") return std::nullopt;
  in >> tag >> value;
  if (tag != "fingerprint" || value != fingerprint) return std::nullopt;
  CellOutput cell;
  std::size_t n = 0;
  in >> tag >> n;
  if (tag != "history") return std::nullopt;
  for (std::size_t i = 0; i < n && in >> value; ++i)
    cell.epoch_loss.push_back(parse_double(value));
  std::size_t h = 0;
  in >> tag >> h;
  if (tag != "heads" || h != heads) return std::nullopt;
  for (std::size_t k = 0; k < h; ++k) {
    in >> tag >> n;
    if (tag != "head" || n != rows) return std::nullopt;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n && in >> value; ++i)
      scores.push_back(parse_double(value));
    if (scores.size() != rows) return std::nullopt;
    cell.head_scores.push_back(std::move(scores));
  }
  return cell;
}

// Runs `n` independent jobs on up to `workers` threads; rethrows the first
// failure after all threads have stopped.
template <class Job>
void run_pool(std::size_t n, std::size_t workers, Job job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (failure) return;
      }
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '[' || c == ']' || c == '+' || c == '/' || c == ' ') c = '_';
  return s;
}

}  // namespace

std::vector<std::uint64_t> ExperimentSpec::rerun_seeds() const {
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < train.reruns; ++r) seeds.push_back(train.seed + r);
  return seeds;
}

std::string ExperimentSpec::fingerprint() const {
  std::ostringstream os;
  os << variant_name(variant) << '|' << (target ? source_name(*target) : "ALL")
     << '|' << groups.to_string() << '|'
     << (removed_source ? source_name(*removed_source) : "-") << '|'
     << train.epochs << '|' << hexfloat(train.learning_rate) << '|'
     << hexfloat(train.momentum) << '|' << train.batch_size << '|' << train.seed
     << '|' << train.reruns << '|' << train.shared_hidden << '|'
     << train.task_hidden << '|' << hexfloat(train.positive_weight);
  Fnv1a h;
  h.add(os.str());
  return h.hex();
}

std::pair<std::size_t, std::size_t> ExperimentResult::scorer_for(Source s) const {
  for (std::size_t u = 0; u < units.size(); ++u) {
    const TaskSet& ts = units[u];
    const bool per_target =
        ts.variant == Variant::kSingleton || ts.variant == Variant::kSingletonAny;
    if (per_target && ts.target != s) continue;
    if (auto head = ts.head_for(s)) return {u, *head};
  }
  throw ConfigError("no trained head scores source " + std::string(source_name(s)));
}

std::vector<TaskSet> training_units(const ExperimentSpec& spec) {
  if (spec.removed_source && spec.variant != Variant::kMulti)
    throw ConfigError("removing a source is only supported for variant multi");
  if (spec.removed_source && *spec.removed_source == Source::ANY)
    throw ConfigError("cannot remove the ANY task");
  std::vector<TaskSet> units;
  switch (spec.variant) {
    case Variant::kSingleton:
    case Variant::kSingletonAny:
      if (spec.target) {
        units.push_back(TaskSet::make(spec.variant, spec.target));
      } else {
        for (Source s : kRealSources) units.push_back(TaskSet::make(spec.variant, s));
      }
      break;
    case Variant::kAny:
      units.push_back(TaskSet::make(Variant::kAny, spec.target));
      break;
    case Variant::kMulti:
      units.push_back(spec.removed_source ? TaskSet::multi_without(*spec.removed_source)
                                          : TaskSet::make(Variant::kMulti));
      break;
    case Variant::kMultiAny:
      units.push_back(TaskSet::make(Variant::kMultiAny));
      break;
  }
  return units;
}

std::vector<Source> evaluated_sources(const ExperimentSpec& spec) {
  if (spec.target) {
    if (spec.removed_source && *spec.removed_source == *spec.target)
      throw ConfigError("target source was removed from the task set");
    return {*spec.target};
  }
  std::vector<Source> out;
  for (Source s : kRealSources)
    if (!spec.removed_source || *spec.removed_source != s) out.push_back(s);
  return out;
}

ExperimentResult run_experiment(const Corpus& corpus,
                                const FeatureResources& resources,
                                const ExperimentSpec& spec) {
  spec.train.validate();
  if (spec.groups.none()) throw ConfigError("no feature groups selected");
  if (spec.target && *spec.target == Source::ANY)
    throw ConfigError("ANY cannot be a target source");

  ExperimentResult result;
  result.spec = spec;
  result.folds = make_folds(corpus);
  result.units = training_units(spec);
  const std::vector<Source> sources = evaluated_sources(spec);
  const std::vector<std::uint64_t> seeds = spec.rerun_seeds();

  // Fail on missing sidecar or lexicons before any fitting or training.
  {
    FittedExtractors empty;
    for (std::size_t g = 0; g < kNumFeatureGroups; ++g)
      if (spec.groups.test(g))
        group_width(static_cast<FeatureGroup>(g), resources, empty);
  }

  const std::size_t n = corpus.num_sentences();
  std::vector<Eigen::MatrixXd> labels;
  for (const TaskSet& u : result.units) labels.push_back(unit_labels(corpus, u));

  result.scores.resize(result.units.size());
  for (std::size_t u = 0; u < result.units.size(); ++u) {
    result.scores[u].assign(
        seeds.size(),
        std::vector<std::vector<double>>(
            result.units[u].size(),
            std::vector<double>(n, std::numeric_limits<double>::quiet_NaN())));
  }

  Fnv1a corpus_hash;
  for (std::size_t r = 0; r < n; ++r) {
    const Sentence& s = corpus.row(r);
    corpus_hash.add(s.debate_id);
    corpus_hash.add(s.speaker);
    corpus_hash.add(s.text);
    corpus_hash.add(s.labels.data(), s.labels.size());
  }
  const std::string spec_fp = spec.fingerprint() + corpus_hash.hex();

  const std::size_t cells_per_fold = seeds.size() * result.units.size();
  std::vector<CellHistory> histories(result.folds.size() * cells_per_fold);

  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    const Fold& fold = result.folds[f];
    const FittedExtractors fitted = fit_extractors(corpus, resources, fold.train_rows);
    const FeatureMatrix fm =
        assemble_matrix(corpus, resources, spec.groups, fitted, fold.train_rows);
    const std::vector<Eigen::Index> active = varying_columns(fm.values, fold.train_rows);
    if (active.empty())
      throw ConfigError("no feature column varies over the training rows of fold " +
                        std::to_string(f));
    const Eigen::MatrixXd X = fm.values(Eigen::all, active);
    const std::string fold_fp = spec_fp + matrix_digest(X);

    run_pool(cells_per_fold, spec.jobs, [&](std::size_t cell) {
      const std::size_t rerun = cell / result.units.size();
      const std::size_t u = cell % result.units.size();
      const TaskSet& unit = result.units[u];
      const std::string fingerprint = fold_fp + "|" + std::to_string(f) + "|" +
                                      std::to_string(rerun) + "|" + unit.label();
      std::filesystem::path ckpt;
      if (!spec.output_dir.empty()) {
        ckpt = spec.output_dir / "cells" /
               (file_safe(fold.test_debate_id) + "_r" + std::to_string(rerun) +
                "_" + file_safe(unit.label()) + ".cell");
      }

      std::optional<CellOutput> out;
      if (!ckpt.empty() && spec.resume)
        out = load_cell(ckpt, fingerprint, unit.size(), fold.test_rows.size());
      if (!out) {
        out.emplace();
        MtlNetwork net = init_network(static_cast<std::size_t>(X.cols()), unit, spec.train,
                                      seeds[rerun]);
        TrainResult tr = train(net, X, labels[u], fold.train_rows, spec.train, seeds[rerun]);
        out->epoch_loss = std::move(tr.epoch_loss);
        for (Source task : unit.tasks)
          out->head_scores.push_back(predict(net, X, fold.test_rows, task));
        if (!ckpt.empty()) save_cell(ckpt, fingerprint, *out);
      }

      for (std::size_t h = 0; h < unit.size(); ++h)
        for (std::size_t i = 0; i < fold.test_rows.size(); ++i)
          result.scores[u][rerun][h][fold.test_rows[i]] = out->head_scores[h][i];
      histories[f * cells_per_fold + cell] =
          CellHistory{f, rerun, u, std::move(out->epoch_loss)};
    });
  }
  result.histories = std::move(histories);

  result.report.variant = result.units.front().label();
  if (spec.variant == Variant::kSingleton || spec.variant == Variant::kSingletonAny ||
      spec.variant == Variant::kAny)
    result.report.variant = std::string(variant_name(spec.variant));
  result.report.seeds = seeds;
  for (Source s : sources) {
    const auto [u, h] = result.scorer_for(s);
    std::vector<std::vector<RankedDebate>> runs(seeds.size());
    for (std::size_t r = 0; r < seeds.size(); ++r) {
      for (const Fold& fold : result.folds) {
        std::vector<RankedItem> items;
        for (std::size_t row : fold.test_rows) {
          const Sentence& sent = corpus.row(row);
          items.push_back(RankedItem{static_cast<std::size_t>(sent.index),
                                     result.scores[u][r][h][row], sent.label(s)});
        }
        runs[r].emplace_back(fold.test_debate_id, std::move(items));
      }
    }
    result.report.rows[s] = evaluate_source(runs);
  }
  return result;
}

std::vector<FeatureAblationRow> feature_ablation(const Corpus& corpus,
                                                 const FeatureResources& resources,
                                                 const ExperimentSpec& base) {
  if (base.variant != Variant::kMulti)
    throw ConfigError("feature ablation runs on variant multi");
  std::vector<FeatureAblationRow> rows;
  for (std::size_t g = 0; g < kNumFeatureGroups; ++g) {
    if (!base.groups.test(g)) continue;
    const auto group = static_cast<FeatureGroup>(g);
    ExperimentSpec spec = base;
    spec.groups.reset(g);
    spec.name = base.name + "-no-" + std::string(group_name(group));
    if (!base.output_dir.empty())
      spec.output_dir = base.output_dir / ("no-" + std::string(group_name(group)));
    ExperimentResult r = run_experiment(corpus, resources, spec);
    r.report.variant = "multi-no-" + std::string(group_name(group));
    rows.push_back(FeatureAblationRow{group, std::move(r.report)});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const FeatureAblationRow& a, const FeatureAblationRow& b) {
                     const auto ma = a.report.average()[0];
                     const auto mb = b.report.average()[0];
                     if (ma && mb) return *ma < *mb;
                     return ma.has_value() && !mb.has_value();
                   });
  return rows;
}

AblationMatrix source_ablation(const Corpus& corpus,
                               const FeatureResources& resources,
                               const ExperimentSpec& base) {
  if (base.variant != Variant::kMulti)
    throw ConfigError("source ablation runs on variant multi");
  ExperimentSpec full_spec = base;
  full_spec.target.reset();
  full_spec.removed_source.reset();
  if (!base.output_dir.empty()) full_spec.output_dir = base.output_dir / "full";

  AblationMatrix m;
  m.full = run_experiment(corpus, resources, full_spec).report;
  for (Source removed : kRealSources) {
    ExperimentSpec spec = full_spec;
    spec.removed_source = removed;
    spec.name = base.name + "-no-" + std::string(source_name(removed));
    if (!base.output_dir.empty())
      spec.output_dir = base.output_dir / ("no-" + std::string(source_name(removed)));
    const MetricReport without = run_experiment(corpus, resources, spec).report;
    for (Source c : kRealSources) {
      if (c == removed) continue;
      const auto& a = without.rows.at(c)[0];
      const auto& b = m.full.rows.at(c)[0];
      if (a && b) m.delta[column(removed)][column(c)] = *a - *b;
    }
  }
  return m;
}

std::vector<PredictionRecord> prediction_records(const Corpus& corpus,
                                                 const ExperimentResult& result) {
  std::vector<std::size_t> fold_of(corpus.num_sentences(), 0);
  for (std::size_t f = 0; f < result.folds.size(); ++f)
    for (std::size_t r : result.folds[f].test_rows) fold_of[r] = f;

  std::vector<PredictionRecord> records;
  records.reserve(corpus.num_sentences());
  for (std::size_t r = 0; r < corpus.num_sentences(); ++r) {
    const Sentence& s = corpus.row(r);
    PredictionRecord rec;
    rec.debate_id = s.debate_id;
    rec.index = s.index;
    rec.speaker = s.speaker;
    rec.fold = fold_of[r];
    rec.labels = s.labels;
    rec.selected_by = s.selected_by();
    for (std::size_t u = 0; u < result.units.size(); ++u) {
      const TaskSet& unit = result.units[u];
      for (std::size_t h = 0; h < unit.size(); ++h) {
        std::vector<double> per_rerun;
        for (const auto& rerun : result.scores[u]) per_rerun.push_back(rerun[h][r]);
        rec.scores.emplace_back(
            unit.label() + ":" + std::string(source_name(unit.tasks[h])),
            std::move(per_rerun));
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PredictionRecord> dump_predictions(const Corpus& corpus,
                                               const FeatureResources& resources,
                                               const ExperimentSpec& spec) {
  return prediction_records(corpus, run_experiment(corpus, resources, spec));
}

void write_predictions_jsonl(const std::vector<PredictionRecord>& records,
                             std::ostream& out) {
  for (const PredictionRecord& rec : records) {
    ordered_json labels = ordered_json::object();
    for (Source s : kRealSources)
      labels[std::string(source_name(s))] = rec.labels[column(s)];
    ordered_json scores = ordered_json::object();
    for (const auto& [key, values] : rec.scores) scores[key] = values;
    ordered_json j = {{"debate_id", rec.debate_id}, {"index", rec.index},
              {"speaker", rec.speaker},     {"fold", rec.fold},
              {"labels", labels},           {"selected_by", rec.selected_by},
              {"scores", scores}};
    out << j.dump() << '\n';
  }
}

std::vector<PredictionRecord> read_predictions_jsonl(std::istream& in) {
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string loc = "predictions line " + std::to_string(lineno);
    try {
      const ordered_json j = ordered_json::parse(line);
      PredictionRecord rec;
      rec.debate_id = j.at("debate_id").get<std::string>();
      rec.index = j.at("index").get<int>();
      rec.speaker = j.at("speaker").get<std::string>();
      rec.fold = j.at("fold").get<std::size_t>();
      rec.selected_by = j.at("selected_by").get<int>();
      for (Source s : kRealSources)
        rec.labels[column(s)] =
            static_cast<std::uint8_t>(j.at("labels").at(std::string(source_name(s))).get<int>());
      for (const auto& [key, values] : j.at("scores").items())
        rec.scores.emplace_back(key, values.get<std::vector<double>>());
      records.push_back(std::move(rec));
    } catch (const ordered_json::exception& e) {
      throw ParseError(loc + ": " + e.what());
    }
  }
  return records;
}

MetricReport evaluate_predictions(const std::vector<PredictionRecord>& records,
                                  const std::string& variant) {
  MetricReport report;
  report.variant = variant;
  if (records.empty()) return report;

  std::vector<std::string> keys;
  for (const auto& [key, values] : records.front().scores) keys.push_back(key);
  auto keys_ending = [&](std::string_view suffix) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < keys.size(); ++k)
      if (keys[k].size() >= suffix.size() &&
          keys[k].compare(keys[k].size() - suffix.size(), suffix.size(), suffix) == 0)
        out.push_back(k);
    return out;
  };

  for (Source s : kRealSources) {
    auto match = keys_ending(":" + std::string(source_name(s)));
    if (match.empty()) match = keys_ending(":ANY");
    if (match.size() != 1) continue;
    const std::size_t key = match.front();
    const std::size_t reruns = records.front().scores[key].second.size();

    std::vector<std::vector<RankedDebate>> runs(reruns);
    for (std::size_t r = 0; r < reruns; ++r) {
      std::vector<RankedItem> items;
      std::string debate = records.front().debate_id;
      for (const PredictionRecord& rec : records) {
        if (rec.debate_id != debate) {
          runs[r].emplace_back(debate, std::move(items));
          items.clear();
          debate = rec.debate_id;
        }
        if (rec.scores.size() != keys.size() || rec.scores[key].first != keys[key] ||
            rec.scores[key].second.size() != reruns)
          throw ValidationError("prediction records disagree on score keys");
        items.push_back(RankedItem{static_cast<std::size_t>(rec.index),
                                   rec.scores[key].second[r],
                                   rec.labels[column(s)] != 0});
      }
      runs[r].emplace_back(debate, std::move(items));
    }
    report.rows[s] = evaluate_source(runs);
  }
  return report;
}

}  // namespace cwrank
