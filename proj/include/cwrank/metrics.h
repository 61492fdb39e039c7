#ifndef CWRANK_METRICS_H_
#define CWRANK_METRICS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cwrank/source.h"

namespace cwrank {

struct RankedItem {
  std::size_t index = 0;  // sentence index within the debate
  double score = 0.0;
  bool relevant = false;
};

// Items sorted by descending score; equal scores keep ascending sentence
// index, so the order never depends on input order.
class RankedDebate {
 public:
  RankedDebate() = default;
  RankedDebate(std::string debate_id, std::vector<RankedItem> items);

  const std::string& debate_id() const { return debate_id_; }
  const std::vector<RankedItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t positives() const { return positives_; }

 private:
  std::string debate_id_;
  std::vector<RankedItem> items_;
  std::size_t positives_ = 0;
};

// Undefined (nullopt) when the list has no positives.
std::optional<double> average_precision(const RankedDebate& ranked);
std::optional<double> r_precision(const RankedDebate& ranked);
// Positives among the top min(k, n) divided by k. Requires k >= 1.
double precision_at_k(const RankedDebate& ranked, std::size_t k);

enum class Metric { kMAP, kRPrecision, kP5, kP10, kP20, kP50 };
inline constexpr std::size_t kNumMetrics = 6;
inline constexpr std::array<Metric, kNumMetrics> kAllMetrics = {
    Metric::kMAP, Metric::kRPrecision, Metric::kP5,
    Metric::kP10, Metric::kP20,        Metric::kP50};

std::string_view metric_name(Metric m);  // "MAP", "R-Pr", "P@5", ...
std::optional<Metric> parse_metric(std::string_view name);

// Metric value of one ranked debate (nullopt when undefined).
std::optional<double> metric_value(const RankedDebate& ranked, Metric m);

using MetricRow = std::array<std::optional<double>, kNumMetrics>;

// runs[r][d]: ranked test debate d of rerun r. Each metric is averaged over
// the debates where it is defined, then over reruns.
MetricRow evaluate_source(const std::vector<std::vector<RankedDebate>>& runs);

struct MetricReport {
  std::string variant;
  std::vector<std::uint64_t> seeds;
  std::map<Source, MetricRow> rows;  // real sources only

  // Mean over sources with a defined value.
  MetricRow average() const;
  std::string seed_set() const;  // "42;43;44"
};

// CSV columns: source,metric,value,variant,seed_set. Absent values are
// written as an empty field. An "AVG" source row carries the mean.
void write_metrics_csv(const MetricReport& report, std::ostream& out);
// Reads one or more reports (grouped by variant, in first-seen order).
std::vector<MetricReport> read_metrics_csv(std::istream& in);

// Three-decimal value in the ".136" style; "-" when absent.
std::string format_value(const std::optional<double>& v);

}  // namespace cwrank

#endif  // CWRANK_METRICS_H_
