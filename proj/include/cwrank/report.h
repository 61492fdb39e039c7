#ifndef CWRANK_REPORT_H_
#define CWRANK_REPORT_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwrank/experiment.h"
#include "cwrank/metrics.h"

namespace cwrank {

// Per-source blocks followed by the source average; one line per report.
// Values better than the first report's are marked with '*'.
std::string format_comparison_table(const std::vector<MetricReport>& reports);

// One line per removed group, in the given order.
std::string format_feature_ablation(const std::vector<FeatureAblationRow>& rows);

// Rows: removed source; columns: evaluated source; values are MAP deltas.
std::string format_ablation_matrix(const AblationMatrix& m);
void write_ablation_matrix_csv(const AblationMatrix& m, std::ostream& out);
AblationMatrix read_ablation_matrix_csv(std::istream& in);

// Writes metrics.csv and table.txt for `reports` under `dir`. Throws
// ConfigError when there is nothing to report and std::runtime_error naming
// the path when a file cannot be written.
void render_report(const std::vector<MetricReport>& reports,
                   const std::filesystem::path& dir);

// metrics.csv, table.txt, predictions.jsonl and history/*.csv.
void write_experiment_outputs(const Corpus& corpus, const ExperimentResult& result,
                              const std::filesystem::path& dir);

}  // namespace cwrank

#endif  // CWRANK_REPORT_H_
