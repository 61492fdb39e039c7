#include "cwrank/experiment.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cwrank/error.h"
#include "cwrank/synthetic.h"
#include "test_util.h"

namespace cwrank {
namespace {

TrainConfig tiny_train() {
  TrainConfig t;
  t.epochs = 3;
  t.shared_hidden = 16;
  t.task_hidden = 8;
  t.batch_size = 16;
  t.reruns = 1;
  return t;
}

class ExperimentTest : public ::testing::Test {
 protected:
  ExperimentTest()
      : data_(make_synthetic({.debates = 2, .sentences_per_debate = 60, .embedding_dim = 6,
                              .topic_count = 3})) {
    res_.annotations = &data_.annotations;
    res_.lexicons = synthetic_lexicons();
    spec_.train = tiny_train();
  }

  SyntheticData data_;
  FeatureResources res_;
  ExperimentSpec spec_;
};

TEST_F(ExperimentTest, SmokeEmitsSixMetricsPerSource) {
  const ExperimentResult r = run_experiment(data_.corpus, res_, spec_);
  EXPECT_EQ(r.report.variant, "multi");
  EXPECT_EQ(r.report.seeds, std::vector<std::uint64_t>{42});
  ASSERT_EQ(r.report.rows.size(), kNumSources);
  for (const auto& [src, row] : r.report.rows)
    for (const auto& v : row) {
      ASSERT_TRUE(v) << source_name(src);
      EXPECT_GE(*v, 0.0);
      EXPECT_LE(*v, 1.0);
    }
  ASSERT_EQ(r.folds.size(), 2u);
  EXPECT_EQ(r.histories.size(), 2u);
  EXPECT_EQ(r.histories[0].epoch_loss.size(), 3u);
}

TEST_F(ExperimentTest, TrainingUnitsPerVariant) {
  ExperimentSpec s;
  s.variant = Variant::kSingleton;
  EXPECT_EQ(training_units(s).size(), 9u);
  s.target = Source::NYT;
  ASSERT_EQ(training_units(s).size(), 1u);
  EXPECT_EQ(evaluated_sources(s), std::vector<Source>{Source::NYT});
  s.variant = Variant::kAny;
  s.target.reset();
  ASSERT_EQ(training_units(s).size(), 1u);
  EXPECT_EQ(evaluated_sources(s).size(), 9u);
  s.variant = Variant::kSingletonAny;
  EXPECT_EQ(training_units(s).size(), 9u);
  EXPECT_EQ(training_units(s)[0].size(), 2u);
  s.variant = Variant::kMulti;
  s.removed_source = Source::NYT;
  ASSERT_EQ(training_units(s).size(), 1u);
  EXPECT_EQ(training_units(s)[0].size(), 8u);
  EXPECT_EQ(evaluated_sources(s).size(), 8u);
}

TEST_F(ExperimentTest, VariantsScoreEveryTarget) {
  for (Variant v : {Variant::kSingleton, Variant::kMultiAny, Variant::kAny,
                    Variant::kSingletonAny}) {
    spec_.variant = v;
    spec_.train.epochs = 1;
    const ExperimentResult r = run_experiment(data_.corpus, res_, spec_);
    EXPECT_EQ(r.report.variant, variant_name(v));
    EXPECT_EQ(r.report.rows.size(), kNumSources) << variant_name(v);
  }
}

TEST_F(ExperimentTest, MissingSidecarFailsBeforeTraining) {
  FeatureResources bare;
  bare.lexicons = res_.lexicons;
  spec_.output_dir = testing::scratch_dir("no_sidecar");
  EXPECT_THROW(run_experiment(data_.corpus, bare, spec_), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(spec_.output_dir / "cells"));
  GroupSet plain;
  plain.set(group_bit(FeatureGroup::kLengths));
  plain.set(group_bit(FeatureGroup::kContradiction));
  spec_.groups = plain;
  EXPECT_NO_THROW(run_experiment(data_.corpus, bare, spec_));
}

TEST_F(ExperimentTest, ResumeAndParallelCellsMatch) {
  spec_.train.reruns = 2;
  const ExperimentResult plain = run_experiment(data_.corpus, res_, spec_);
  spec_.output_dir = testing::scratch_dir("resume");
  spec_.jobs = 2;
  const ExperimentResult first = run_experiment(data_.corpus, res_, spec_);
  const ExperimentResult resumed = run_experiment(data_.corpus, res_, spec_);
  EXPECT_EQ(first.scores, plain.scores);
  EXPECT_EQ(resumed.scores, plain.scores);
  EXPECT_EQ(resumed.histories.size(), plain.histories.size());
  EXPECT_EQ(resumed.histories[3].epoch_loss, plain.histories[3].epoch_loss);
  std::size_t cells = 0;
  for (const auto& e : std::filesystem::directory_iterator(spec_.output_dir / "cells"))
    cells += e.path().extension() == ".cell";
  EXPECT_EQ(cells, 4u);

  // A changed spec must not reuse stale cells.
  spec_.train.learning_rate = 0.02;
  const ExperimentResult changed = run_experiment(data_.corpus, res_, spec_);
  EXPECT_NE(changed.scores, plain.scores);
}

TEST_F(ExperimentTest, AllZeroGroupRemovalIsNoOp) {
  std::vector<Annotation> rows;
  for (std::size_t r = 0; r < data_.annotations.size(); ++r) {
    rows.push_back(data_.annotations.row(r));
    std::fill(rows.back().embedding.begin(), rows.back().embedding.end(), 0.0);
  }
  const AnnotationStore zeroed(rows, data_.annotations.topic_count(),
                               data_.annotations.embedding_dim());
  res_.annotations = &zeroed;
  const MetricReport with = run_experiment(data_.corpus, res_, spec_).report;
  spec_.groups.reset(group_bit(FeatureGroup::kEmbeddings));
  const MetricReport without = run_experiment(data_.corpus, res_, spec_).report;
  EXPECT_EQ(with.rows, without.rows);
}

TEST_F(ExperimentTest, RemovedSourceLabel) {
  spec_.removed_source = Source::NYT;
  const ExperimentResult r = run_experiment(data_.corpus, res_, spec_);
  EXPECT_EQ(r.report.variant, "multi-NYT");
  EXPECT_EQ(r.report.rows.count(Source::NYT), 0u);
  EXPECT_EQ(r.report.rows.size(), 8u);
}

TEST_F(ExperimentTest, FeatureAblationHasTwelveSortedRows) {
  spec_.train.epochs = 2;
  const auto rows = feature_ablation(data_.corpus, res_, spec_);
  ASSERT_EQ(rows.size(), kNumFeatureGroups);
  GroupSet seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    seen.set(group_bit(rows[i].removed));
    EXPECT_EQ(rows[i].report.variant,
              "multi-no-" + std::string(group_name(rows[i].removed)));
    if (i) EXPECT_LE(*rows[i - 1].report.average()[0], *rows[i].report.average()[0]);
  }
  EXPECT_TRUE(seen.all());
  spec_.variant = Variant::kAny;
  EXPECT_THROW(feature_ablation(data_.corpus, res_, spec_), ConfigError);
}

TEST_F(ExperimentTest, SourceAblationMatrixShape) {
  spec_.train.epochs = 2;
  const AblationMatrix m = source_ablation(data_.corpus, res_, spec_);
  EXPECT_EQ(m.full.variant, "multi");
  for (std::size_t r = 0; r < kNumSources; ++r)
    for (std::size_t c = 0; c < kNumSources; ++c)
      EXPECT_EQ(m.delta[r][c].has_value(), r != c) << r << "," << c;
}

TEST_F(ExperimentTest, PredictionsReproduceReport) {
  spec_.train.reruns = 2;
  const ExperimentResult r = run_experiment(data_.corpus, res_, spec_);
  const auto records = prediction_records(data_.corpus, r);
  ASSERT_EQ(records.size(), data_.corpus.num_sentences());
  for (const auto& rec : records) {
    ASSERT_EQ(rec.scores.size(), 9u);
    for (const auto& [key, values] : rec.scores) {
      ASSERT_EQ(values.size(), 2u);
      for (double v : values) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
      }
    }
  }
  std::stringstream buf;
  write_predictions_jsonl(records, buf);
  const auto back = read_predictions_jsonl(buf);
  ASSERT_EQ(back.size(), records.size());
  EXPECT_EQ(back[17].scores, records[17].scores);
  EXPECT_EQ(back[17].selected_by, records[17].selected_by);
  const MetricReport again = evaluate_predictions(back, "multi");
  EXPECT_EQ(again.rows, r.report.rows);
}

// Excerpt of a debate transcript with per-source labels, followed by a
// second debate so that cross-validation has something to train on.
Corpus excerpt_corpus() {
  using testing::sentence;
  auto row = [](std::initializer_list<int> v) {
    LabelRow r{};
    std::size_t i = 0;
    for (int x : v) r[i++] = static_cast<std::uint8_t>(x);
    return r;
  };
  const std::vector<std::tuple<std::string, std::string, LabelRow>> lines = {
      {"CLINTON", "So we're now on the precipice of having a potentially much better economy.",
       row({0, 0, 0, 0, 0, 0, 0, 0, 0})},
      {"CLINTON",
       "If his tax plan, which would blow up the debt by over $5 trillion, were to go into "
       "effect, we would lose 3.5 million jobs.",
       row({1, 0, 0, 1, 1, 0, 1, 1, 1})},
      {"CLINTON", "Take clean energy.", row({0, 0, 0, 0, 0, 0, 0, 0, 0})},
      {"CLINTON", "Donald thinks that climate change is a hoax perpetrated by the Chinese.",
       row({1, 1, 1, 1, 0, 0, 1, 0, 1})},
      {"CLINTON", "I think it's real.", row({0, 0, 0, 0, 0, 0, 0, 0, 0})},
      {"TRUMP", "I did not.", row({1, 1, 0, 1, 1, 1, 0, 0, 0})},
  };
  std::vector<Debate> debates;
  for (const std::string id : {"first", "second"}) {
    Debate d{id, {}};
    for (const auto& [speaker, text, labels] : lines)
      d.sentences.push_back(
          sentence(id, static_cast<int>(d.sentences.size()), speaker, text, labels));
    debates.push_back(d);
  }
  return Corpus(debates);
}

TEST(DumpPredictions, ExcerptSelectedByCounts) {
  const Corpus c = excerpt_corpus();
  FeatureResources res;
  res.lexicons = synthetic_lexicons();
  res.vocab.min_df = 1;
  ExperimentSpec spec;
  spec.train = tiny_train();
  spec.groups = all_groups();
  for (FeatureGroup g : {FeatureGroup::kEmbeddings, FeatureGroup::kSentiment,
                         FeatureGroup::kTopics, FeatureGroup::kDiscourse, FeatureGroup::kNER,
                         FeatureGroup::kLinguistic, FeatureGroup::kSimToPrev})
    spec.groups.reset(group_bit(g));
  const auto records = dump_predictions(c, res, spec);
  ASSERT_EQ(records.size(), c.num_sentences());
  const PredictionRecord& hoax = records[3];
  EXPECT_NE(c.row(3).text.find("hoax"), std::string::npos);
  EXPECT_EQ(hoax.selected_by, 6);
  EXPECT_EQ(records[5].selected_by, 5);
  EXPECT_EQ(hoax.fold, 0u);
  EXPECT_EQ(records[9].fold, 1u);
  EXPECT_EQ(hoax.speaker, "CLINTON");
}

}  // namespace
}  // namespace cwrank
