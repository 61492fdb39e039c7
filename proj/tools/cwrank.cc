// Command-line driver: corpus validation and statistics, featurization,
// cross-validated training, ablations, prediction dumps and reports.
//
// Exit codes: 0 success, 1 usage, 2 validation/configuration, 3 runtime.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cwrank/annotations.h"
#include "cwrank/config.h"
#include "cwrank/corpus.h"
#include "cwrank/error.h"
#include "cwrank/experiment.h"
#include "cwrank/features.h"
#include "cwrank/report.h"

namespace {

using namespace cwrank;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string g_stage = "startup";

void stage(const std::string& s) {
  g_stage = s;
  std::clog << "[cwrank] " << s << std::endl;
}

struct Overrides {
  std::string config;
  std::string corpus, annotations, lexicons, out, name, variant, target, groups;
  std::optional<std::size_t> epochs, reruns, jobs;
  std::optional<std::uint64_t> seed;
  bool no_resume = false;

  void attach(CLI::App* cmd, bool config_required = true) {
    auto* opt = cmd->add_option("--config", config, "Experiment config file");
    if (config_required) opt->required();
    cmd->add_option("--corpus", corpus, "Corpus JSON Lines (overrides config)");
    cmd->add_option("--annotations", annotations, "Sidecar annotations (overrides config)");
    cmd->add_option("--lexicons", lexicons, "Lexicon directory (overrides config)");
    cmd->add_option("--out", out, "Output root (overrides config)");
    cmd->add_option("--name", name, "Experiment name");
    cmd->add_option("--variant", variant, "singleton|multi|multi+any|any|singleton+any");
    cmd->add_option("--target", target, "Target source or ALL");
    cmd->add_option("--groups", groups, "Feature groups: all or comma list");
    cmd->add_option("--epochs", epochs, "Training epochs");
    cmd->add_option("--reruns", reruns, "Number of seeded reruns");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--jobs", jobs, "Parallel grid cells");
    cmd->add_flag("--no-resume", no_resume, "Ignore cell checkpoints");
  }

  RunConfig resolve() const {
    stage("loading config");
    RunConfig cfg;
    if (!config.empty()) cfg = load_run_config(config);
    if (!corpus.empty()) cfg.corpus = corpus;
    if (!annotations.empty()) cfg.annotations = annotations;
    if (!lexicons.empty()) cfg.lexicons = lexicons;
    if (!out.empty()) cfg.output_root = out;
    if (!name.empty()) cfg.spec.name = name;
    if (!variant.empty()) {
      auto v = parse_variant(variant);
      if (!v) throw ConfigError("unknown variant '" + variant + "'");
      cfg.spec.variant = *v;
    }
    if (!target.empty()) cfg.spec.target = parse_target(target);
    if (!groups.empty()) cfg.spec.groups = parse_group_list(groups);
    if (epochs) cfg.spec.train.epochs = *epochs;
    if (reruns) cfg.spec.train.reruns = *reruns;
    if (seed) cfg.spec.train.seed = *seed;
    if (jobs) cfg.spec.jobs = *jobs;
    if (no_resume) cfg.spec.resume = false;
    cfg.spec.train.validate();
    if (cfg.corpus.empty()) throw ConfigError("no corpus path given");
    cfg.spec.output_dir = cfg.output_dir();
    return cfg;
  }
};

struct Loaded {
  Corpus corpus;
  std::unique_ptr<AnnotationStore> annotations;
  FeatureResources resources;
};

std::unique_ptr<Loaded> load_inputs(const RunConfig& cfg) {
  auto in = std::make_unique<Loaded>();
  stage("loading corpus " + cfg.corpus.string());
  in->corpus = load_corpus(cfg.corpus);
  if (!cfg.annotations.empty()) {
    stage("loading annotations " + cfg.annotations.string());
    in->annotations = std::make_unique<AnnotationStore>(
        ingest_annotations(cfg.annotations, in->corpus));
    in->resources.annotations = in->annotations.get();
  }
  if (!cfg.lexicons.empty()) {
    stage("loading lexicons " + cfg.lexicons.string());
    in->resources.lexicons = load_lexicon_dir(cfg.lexicons);
  }
  in->resources.vocab = cfg.vocab;
  return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int cmd_validate(const std::string& corpus_path, const std::string& annotations,
                 const std::string& lexicons) {
  stage("validating corpus " + corpus_path);
  const Corpus corpus = load_corpus(corpus_path);
  std::cout << "corpus ok: " << corpus.num_debates() << " debates, "
            << corpus.num_sentences() << " sentences\n";
  if (!annotations.empty()) {
    stage("validating annotations " + annotations);
    const AnnotationStore store = ingest_annotations(annotations, corpus);
    std::cout << "annotations ok: " << store.size() << " records, K="
              << store.topic_count() << ", D=" << store.embedding_dim() << '\n';
  }
  if (!lexicons.empty()) {
    stage("validating lexicons " + lexicons);
    const LexiconSet set = load_lexicon_dir(lexicons);
    std::cout << "lexicons ok:";
    for (const auto& l : set.linguistic) std::cout << ' ' << l.name() << '=' << l.size();
    for (const auto& l : set.sentiment) std::cout << ' ' << l.name() << '=' << l.size();
    std::cout << '\n';
  }
  return 0;
}

int cmd_stats(const std::string& corpus_path) {
  stage("loading corpus " + corpus_path);
  const Corpus corpus = load_corpus(corpus_path);
  const auto any = derive_any_labels(corpus);
  std::size_t positives = 0;
  for (auto v : any) positives += v;
  std::cout << "debates     " << corpus.num_debates() << '\n';
  std::cout << "sentences   " << corpus.num_sentences() << '\n';
  std::cout << "ANY         " << positives << '\n';
  std::cout << "per source ";
  for (Source s : kRealSources) {
    std::size_t n = 0;
    for (std::size_t r = 0; r < corpus.num_sentences(); ++r) n += corpus.row(r).label(s);
    std::cout << ' ' << source_name(s) << '=' << n;
  }
  std::cout << "\n\n" << format_agreement_table(agreement_table(corpus));
  return 0;
}

int cmd_featurize(const Overrides& o, std::size_t fold_index) {
  const RunConfig cfg = o.resolve();
  auto in = load_inputs(cfg);
  const auto folds = make_folds(in->corpus);
  if (fold_index >= folds.size())
    throw ConfigError("fold " + std::to_string(fold_index) + " out of range (" +
                      std::to_string(folds.size()) + " folds)");
  const Fold& fold = folds[fold_index];
  stage("featurizing fold " + std::to_string(fold_index) + " (test " +
        fold.test_debate_id + ")");
  const FittedExtractors fitted = fit_extractors(in->corpus, in->resources, fold.train_rows);
  const FeatureMatrix m =
      assemble_matrix(in->corpus, in->resources, cfg.spec.groups, fitted, fold.train_rows);

  const auto path = cfg.output_dir() / ("features_fold" + std::to_string(fold_index) + ".csv");
  stage("writing " + path.string());
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "debate_id,index,split";
  for (const auto& name : m.column_names) out << ',' << name;
  out << '\n';
  std::vector<char> is_test(in->corpus.num_sentences(), 0);
  for (std::size_t r : fold.test_rows) is_test[r] = 1;
  char buf[40];
  for (std::size_t r = 0; r < in->corpus.num_sentences(); ++r) {
    const Sentence& s = in->corpus.row(r);
    out << s.debate_id << ',' << s.index << ',' << (is_test[r] ? "test" : "train");
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.10g", m.values(static_cast<Eigen::Index>(r), c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << " (" << m.values.rows() << " x "
            << m.values.cols() << ")\n";
  return 0;
}

int cmd_train(const Overrides& o, bool predictions_only) {
  const RunConfig cfg = o.resolve();
  auto in = load_inputs(cfg);
  stage("running experiment " + cfg.spec.name);
  const ExperimentResult result = run_experiment(in->corpus, in->resources, cfg.spec);
  const auto dir = cfg.output_dir();
  stage("writing outputs to " + dir.string());
  if (predictions_only) {
    const auto path = dir / "predictions.jsonl";
    std::filesystem::create_directories(dir);
    std::ofstream out(path);
    write_predictions_jsonl(prediction_records(in->corpus, result), out);
    if (!out) throw std::runtime_error("cannot write " + path.string());
  } else {
    write_experiment_outputs(in->corpus, result, dir);
    std::cout << format_comparison_table({result.report});
  }
  return 0;
}

int cmd_evaluate(const std::string& predictions, const std::string& variant,
                 const std::string& out_dir) {
  stage("reading predictions " + predictions);
  std::ifstream in(predictions);
  if (!in) throw ConfigError("cannot open predictions file " + predictions);
  const auto records = read_predictions_jsonl(in);
  stage("evaluating");
  const MetricReport report = evaluate_predictions(records, variant);
  render_report({report}, out_dir);
  std::cout << format_comparison_table({report});
  return 0;
}

int cmd_ablate_features(const Overrides& o) {
  RunConfig cfg = o.resolve();
  auto in = load_inputs(cfg);
  stage("feature ablation " + cfg.spec.name);
  const auto rows = feature_ablation(in->corpus, in->resources, cfg.spec);
  const auto dir = cfg.output_dir();
  stage("writing outputs to " + dir.string());
  std::vector<MetricReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  render_report(reports, dir);
  const std::string table = format_feature_ablation(rows);
  write_text(dir / "feature_ablation.txt", table);
  std::cout << table;
  return 0;
}

int cmd_ablate_sources(const Overrides& o) {
  RunConfig cfg = o.resolve();
  auto in = load_inputs(cfg);
  stage("source ablation " + cfg.spec.name);
  const AblationMatrix m = source_ablation(in->corpus, in->resources, cfg.spec);
  const auto dir = cfg.output_dir();
  stage("writing outputs to " + dir.string());
  render_report({m.full}, dir);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "ablation_matrix.csv");
  write_ablation_matrix_csv(m, csv);
  if (!csv) throw std::runtime_error("cannot write ablation_matrix.csv");
  const std::string table = format_ablation_matrix(m);
  write_text(dir / "ablation_matrix.txt", table);
  std::cout << table;
  return 0;
}

int cmd_report(const std::vector<std::string>& metrics, const std::string& out_dir) {
  std::vector<MetricReport> reports;
  for (const auto& path : metrics) {
    stage("reading " + path);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open metrics file " + path);
    for (auto& r : read_metrics_csv(in)) reports.push_back(std::move(r));
  }
  stage("writing report to " + out_dir);
  render_report(reports, out_dir);
  std::cout << format_comparison_table(reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source check-worthiness ranking"};
  app.require_subcommand(1);

  std::string corpus, annotations, lexicons;
  auto* validate = app.add_subcommand("validate", "Validate corpus, sidecar and lexicons");
  validate->add_option("--corpus", corpus, "Corpus JSON Lines")->required();
  validate->add_option("--annotations", annotations, "Sidecar annotations");
  validate->add_option("--lexicons", lexicons, "Lexicon directory");

  std::string stats_corpus;
  auto* stats = app.add_subcommand("stats", "Print corpus statistics and agreement table");
  stats->add_option("--corpus", stats_corpus, "Corpus JSON Lines")->required();

  Overrides feat_o, train_o, abl_f_o, abl_s_o, dump_o;
  std::size_t fold = 0;
  auto* featurize = app.add_subcommand("featurize", "Write the feature matrix of one fold");
  feat_o.attach(featurize);
  featurize->add_option("--fold", fold, "Fold index (default 0)");
  auto* train_cmd = app.add_subcommand("train", "Cross-validate one variant");
  train_o.attach(train_cmd);
  auto* abl_f = app.add_subcommand("ablate-features", "Remove one feature group at a time");
  abl_f_o.attach(abl_f);
  auto* abl_s = app.add_subcommand("ablate-sources", "Remove one source task at a time");
  abl_s_o.attach(abl_s);
  auto* dump = app.add_subcommand("dump", "Write per-sentence predictions");
  dump_o.attach(dump);

  std::string predictions, eval_variant = "multi", eval_out = "out/evaluate";
  auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from a prediction dump");
  evaluate->add_option("--predictions", predictions, "predictions.jsonl")->required();
  evaluate->add_option("--variant", eval_variant, "Variant label for the report");
  evaluate->add_option("--out", eval_out, "Output directory");

  std::vector<std::string> metric_files;
  std::string report_out = "out/report";
  auto* report = app.add_subcommand("report", "Compare metrics.csv files side by side");
  report->add_option("--metrics", metric_files, "metrics.csv files")->required();
  report->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(corpus, annotations, lexicons);
    if (*stats) return cmd_stats(stats_corpus);
    if (*featurize) return cmd_featurize(feat_o, fold);
    if (*train_cmd) return cmd_train(train_o, false);
    if (*dump) return cmd_train(dump_o, true);
    if (*evaluate) return cmd_evaluate(predictions, eval_variant, eval_out);
    if (*abl_f) return cmd_ablate_features(abl_f_o);
    if (*abl_s) return cmd_ablate_sources(abl_s_o);
    if (*report) return cmd_report(metric_files, report_out);
  } catch (const ParseError& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
