#include "cwrank/report.h"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "cwrank/error.h"

namespace cwrank {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

bool has_values(const MetricReport& r) {
  for (const auto& [src, row] : r.rows)
    for (const auto& v : row)
      if (v) return true;
  return false;
}

// Drops trailing blanks left by the marker column.
void end_line(std::ostringstream& os) {
  std::string text = os.str();
  while (!text.empty() && text.back() == ' ') text.pop_back();
  os.str(text);
  os.seekp(0, std::ios::end);
  os << '\n';
}

void table_header(std::ostringstream& os, std::size_t name_width) {
  os << std::left << std::setw(static_cast<int>(name_width)) << "model";
  for (Metric m : kAllMetrics)
    os << std::right << std::setw(7) << metric_name(m) << ' ';
  end_line(os);
}

void table_line(std::ostringstream& os, std::size_t name_width,
                const std::string& name, const MetricRow& row,
                const MetricRow* baseline) {
  os << std::left << std::setw(static_cast<int>(name_width)) << name;
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    std::string cell = format_value(row[m]);
    if (baseline && row[m] && (*baseline)[m] && *row[m] > *(*baseline)[m])
      cell += "*";
    else
      cell += " ";
    os << std::right << std::setw(8) << cell;
  }
  end_line(os);
}

}  // namespace

std::string format_comparison_table(const std::vector<MetricReport>& reports) {
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.variant.size() + 2);
  std::ostringstream os;
  for (Source s : kRealSources) {
    bool any = false;
    for (const auto& r : reports) any = any || r.rows.count(s);
    if (!any) continue;
    os << source_name(s) << '\n';
    table_header(os, width);
    const MetricRow* baseline = nullptr;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      auto it = reports[i].rows.find(s);
      if (it == reports[i].rows.end()) continue;
      table_line(os, width, reports[i].variant, it->second, i ? baseline : nullptr);
      if (i == 0) baseline = &it->second;
    }
    os << '\n';
  }
  os << "Average over sources\n";
  table_header(os, width);
  const MetricRow base = reports.empty() ? MetricRow{} : reports.front().average();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MetricRow avg = reports[i].average();
    table_line(os, width, reports[i].variant, avg, i ? &base : nullptr);
  }
  if (reports.size() > 1) os << "(* better than " << reports.front().variant << ")\n";
  return os.str();
}

std::string format_feature_ablation(const std::vector<FeatureAblationRow>& rows) {
  std::ostringstream os;
  const std::size_t width = 16;
  os << std::left << std::setw(static_cast<int>(width)) << "removed";
  for (Metric m : kAllMetrics) os << std::right << std::setw(8) << metric_name(m);
  os << '\n';
  for (const auto& row : rows) {
    const MetricRow avg = row.report.average();
    os << std::left << std::setw(static_cast<int>(width)) << group_name(row.removed);
    for (std::size_t m = 0; m < kNumMetrics; ++m)
      os << std::right << std::setw(8) << format_value(avg[m]);
    os << '\n';
  }
  return os.str();
}

std::string format_ablation_matrix(const AblationMatrix& m) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "removed";
  for (Source c : kRealSources) os << std::right << std::setw(8) << source_name(c);
  os << '\n';
  for (Source r : kRealSources) {
    os << std::left << std::setw(8) << source_name(r);
    for (Source c : kRealSources) {
      const auto& v = m.delta[column(r)][column(c)];
      std::string cell = "-";
      if (v) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%+.3f", *v);
        cell = buf;
      }
      os << std::right << std::setw(8) << cell;
    }
    os << '\n';
  }
  return os.str();
}

void write_ablation_matrix_csv(const AblationMatrix& m, std::ostream& out) {
  out << "removed";
  for (Source c : kRealSources) out << ',' << source_name(c);
  out << '\n';
  for (Source r : kRealSources) {
    out << source_name(r);
    for (Source c : kRealSources) {
      out << ',';
      if (const auto& v = m.delta[column(r)][column(c)]) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        out << buf;
      }
    }
    out << '\n';
  }
}

AblationMatrix read_ablation_matrix_csv(std::istream& in) {
  AblationMatrix m;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    std::getline(ls, name, ',');
    auto r = parse_source(name);
    if (!r || *r == Source::ANY) throw ParseError("ablation matrix: bad row " + name);
    for (Source c : kRealSources) {
      std::string cell;
      std::getline(ls, cell, ',');
      if (!cell.empty()) m.delta[column(*r)][column(c)] = std::stod(cell);
    }
  }
  return m;
}

void render_report(const std::vector<MetricReport>& reports,
                   const std::filesystem::path& dir) {
  bool any = false;
  for (const auto& r : reports) any = any || has_values(r);
  if (!any) throw ConfigError("no metric values to report");

  const auto csv_path = dir / "metrics.csv";
  auto csv = open_output(csv_path);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::ostringstream one;
    write_metrics_csv(reports[i], one);
    std::string text = one.str();
    if (i > 0) text.erase(0, text.find('\n') + 1);  // single header
    csv << text;
  }
  finish(csv, csv_path);

  const auto table_path = dir / "table.txt";
  auto table = open_output(table_path);
  table << format_comparison_table(reports);
  finish(table, table_path);
}

void write_experiment_outputs(const Corpus& corpus, const ExperimentResult& result,
                              const std::filesystem::path& dir) {
  render_report({result.report}, dir);

  const auto pred_path = dir / "predictions.jsonl";
  auto pred = open_output(pred_path);
  write_predictions_jsonl(prediction_records(corpus, result), pred);
  finish(pred, pred_path);

  for (const CellHistory& h : result.histories) {
    const auto path = dir / "history" /
                      (result.folds[h.fold].test_debate_id + "_r" +
                       std::to_string(h.rerun) + "_" + result.units[h.unit].label() + ".csv");
    auto out = open_output(path);
    TrainResult tr;
    tr.epoch_loss = h.epoch_loss;
    write_history_csv(tr, out);
    finish(out, path);
  }
}

}  // namespace cwrank
