#ifndef CWRANK_EXPERIMENT_H_
#define CWRANK_EXPERIMENT_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cwrank/corpus.h"
#include "cwrank/features.h"
#include "cwrank/metrics.h"
#include "cwrank/network.h"
#include "cwrank/trainer.h"

namespace cwrank {

struct ExperimentSpec {
  std::string name = "experiment";
  Variant variant = Variant::kMulti;
  std::optional<Source> target;  // nullopt: every source
  GroupSet groups = all_groups();
  std::optional<Source> removed_source;  // variant multi only
  TrainConfig train;
  // Cell checkpoints go to <output_dir>/cells; empty disables them.
  std::filesystem::path output_dir;
  std::size_t jobs = 1;
  bool resume = true;

  // Rerun seeds: seed, seed + 1, ...
  std::vector<std::uint64_t> rerun_seeds() const;
  // Everything that influences results, for checkpoint validation.
  std::string fingerprint() const;
};

struct CellHistory {
  std::size_t fold = 0;
  std::size_t rerun = 0;
  std::size_t unit = 0;
  std::vector<double> epoch_loss;
};

struct ExperimentResult {
  ExperimentSpec spec;
  MetricReport report;
  std::vector<Fold> folds;
  // One trained network per unit per (fold, rerun).
  std::vector<TaskSet> units;
  // scores[unit][rerun][head][row]: probability for every corpus row, each
  // row scored by the model of the fold where it is in the test debate.
  std::vector<std::vector<std::vector<std::vector<double>>>> scores;
  std::vector<CellHistory> histories;

  // Unit and head whose scores rank sentences for `s`.
  std::pair<std::size_t, std::size_t> scorer_for(Source s) const;
};

// Task sets trained by one grid cell, in order.
std::vector<TaskSet> training_units(const ExperimentSpec& spec);
// Sources the experiment reports on.
std::vector<Source> evaluated_sources(const ExperimentSpec& spec);

// Leave-one-debate-out cross-validation of one variant with reruns.
// Throws ConfigError before any training if a requested feature group lacks
// its data (e.g. no sidecar annotations).
ExperimentResult run_experiment(const Corpus& corpus,
                                const FeatureResources& resources,
                                const ExperimentSpec& spec);

struct FeatureAblationRow {
  FeatureGroup removed;
  MetricReport report;
};

// One run per feature group with that group removed from the multi model,
// sorted by averaged MAP ascending (ties: canonical group order).
std::vector<FeatureAblationRow> feature_ablation(const Corpus& corpus,
                                                 const FeatureResources& resources,
                                                 const ExperimentSpec& base);

struct AblationMatrix {
  MetricReport full;
  // delta[r][c] = MAP_c(without r) - MAP_c(full); diagonal absent.
  std::array<std::array<std::optional<double>, kNumSources>, kNumSources> delta;
};

AblationMatrix source_ablation(const Corpus& corpus,
                               const FeatureResources& resources,
                               const ExperimentSpec& base);

struct PredictionRecord {
  std::string debate_id;
  int index = 0;
  std::string speaker;
  std::size_t fold = 0;
  LabelRow labels{};
  int selected_by = 0;
  // (task key, per-rerun scores); key is "<unit label>:<task>".
  std::vector<std::pair<std::string, std::vector<double>>> scores;
};

std::vector<PredictionRecord> prediction_records(const Corpus& corpus,
                                                 const ExperimentResult& result);
std::vector<PredictionRecord> dump_predictions(const Corpus& corpus,
                                               const FeatureResources& resources,
                                               const ExperimentSpec& spec);
void write_predictions_jsonl(const std::vector<PredictionRecord>& records,
                             std::ostream& out);
std::vector<PredictionRecord> read_predictions_jsonl(std::istream& in);

// Re-derives metrics from a prediction dump (the `evaluate` command).
MetricReport evaluate_predictions(const std::vector<PredictionRecord>& records,
                                  const std::string& variant);

}  // namespace cwrank

#endif  // CWRANK_EXPERIMENT_H_
