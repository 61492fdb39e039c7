#include "cwrank/report.h"

#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "cwrank/error.h"
#include "test_util.h"

namespace cwrank {
namespace {

MetricReport report(const std::string& name, double base) {
  MetricReport r{name, {42, 43, 44}, {}};
  for (Source s : kRealSources) r.rows[s] = {base, base, base, base, base, base};
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(RenderReport, EmptyIsErrorWithoutFile) {
  const auto dir = testing::scratch_dir("render_empty");
  EXPECT_THROW(render_report({}, dir), ConfigError);
  EXPECT_THROW(render_report({MetricReport{"multi", {1}, {}}}, dir), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir / "metrics.csv"));
}

TEST(RenderReport, WritesCsvAndTable) {
  const auto dir = testing::scratch_dir("render_two");
  render_report({report("singleton", 0.127), report("multi", 0.136)}, dir);
  const std::string table = slurp(dir / "table.txt");
  EXPECT_NE(table.find("singleton     .127    .127"), std::string::npos) << table;
  EXPECT_NE(table.find("multi         .136*   .136*"), std::string::npos) << table;
  EXPECT_NE(table.find("Average over sources"), std::string::npos);
  std::ifstream csv(dir / "metrics.csv");
  const auto back = read_metrics_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].rows, report("multi", 0.136).rows);
}

TEST(RenderReport, UnwritableDirectoryNamesPath) {
  const auto dir = testing::scratch_dir("render_blocked");
  std::ofstream(dir / "blocker") << "x";
  try {
    render_report({report("multi", 0.1)}, dir / "blocker" / "sub");
    FAIL();
  } catch (const ConfigError&) {
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("blocker"), std::string::npos) << e.what();
  }
}

TEST(ComparisonTable, NoMarkerOnFirstOrWorse) {
  const std::string t = format_comparison_table({report("multi", 0.2), report("any", 0.1)});
  EXPECT_FALSE(std::regex_search(t, std::regex("[0-9]\\*"))) << t;
  EXPECT_EQ(t.find(" \n"), std::string::npos) << t;
}

AblationMatrix matrix() {
  AblationMatrix m;
  m.full = report("multi", 0.136);
  for (std::size_t r = 0; r < kNumSources; ++r)
    for (std::size_t c = 0; c < kNumSources; ++c)
      if (r != c) m.delta[r][c] = 0.001 * static_cast<double>(r) - 0.003 * c + 1.0 / 7.0;
  return m;
}

TEST(AblationMatrix, CsvRoundTrip) {
  const AblationMatrix m = matrix();
  std::stringstream buf;
  write_ablation_matrix_csv(m, buf);
  const AblationMatrix back = read_ablation_matrix_csv(buf);
  EXPECT_EQ(back.delta, m.delta);
}

TEST(AblationMatrix, TextHasSignedCells) {
  const std::string t = format_ablation_matrix(matrix());
  EXPECT_NE(t.find("+0.143"), std::string::npos) << t;
  EXPECT_NE(t.find("NYT"), std::string::npos);
}

TEST(FeatureAblationTable, OneLinePerRow) {
  const std::vector<FeatureAblationRow> rows = {
      {FeatureGroup::kEmbeddings, report("multi-no-Embeddings", 0.102)},
      {FeatureGroup::kTopics, report("multi-no-Topics", 0.13)}};
  const std::string t = format_feature_ablation(rows);
  EXPECT_LT(t.find("Embeddings"), t.find("Topics"));
  EXPECT_NE(t.find(".102"), std::string::npos) << t;
}

}  // namespace
}  // namespace cwrank
