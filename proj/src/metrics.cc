#include "cwrank/metrics.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cwrank/error.h"

namespace cwrank {
namespace {

constexpr std::array<std::string_view, kNumMetrics> kMetricNames = {
    "MAP", "R-Pr", "P@5", "P@10", "P@20", "P@50"};

std::optional<double> mean_defined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (!x) continue;
    sum += *x;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

RankedDebate::RankedDebate(std::string debate_id, std::vector<RankedItem> items)
    : debate_id_(std::move(debate_id)), items_(std::move(items)) {
  for (const auto& it : items_)
    if (!(it.score == it.score))
      throw std::invalid_argument("RankedDebate: NaN score");
  std::sort(items_.begin(), items_.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.index < b.index;
            });
  positives_ = static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(),
                    [](const RankedItem& it) { return it.relevant; }));
}

std::optional<double> average_precision(const RankedDebate& ranked) {
  if (ranked.positives() == 0) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  const auto& items = ranked.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].relevant) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(ranked.positives());
}

std::optional<double> r_precision(const RankedDebate& ranked) {
  const std::size_t r = ranked.positives();
  if (r == 0) return std::nullopt;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < r; ++i) hits += ranked.items()[i].relevant;
  return static_cast<double>(hits) / static_cast<double>(r);
}

double precision_at_k(const RankedDebate& ranked, std::size_t k) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
  const std::size_t top = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < top; ++i) hits += ranked.items()[i].relevant;
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::string_view metric_name(Metric m) {
  return kMetricNames[static_cast<std::size_t>(m)];
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i)
    if (kMetricNames[i] == name) return static_cast<Metric>(i);
  return std::nullopt;
}

std::optional<double> metric_value(const RankedDebate& ranked, Metric m) {
  switch (m) {
    case Metric::kMAP: return average_precision(ranked);
    case Metric::kRPrecision: return r_precision(ranked);
    case Metric::kP5: return precision_at_k(ranked, 5);
    case Metric::kP10: return precision_at_k(ranked, 10);
    case Metric::kP20: return precision_at_k(ranked, 20);
    case Metric::kP50: return precision_at_k(ranked, 50);
  }
  return std::nullopt;
}

MetricRow evaluate_source(const std::vector<std::vector<RankedDebate>>& runs) {
  MetricRow row;
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    std::vector<std::optional<double>> per_run;
    for (const auto& debates : runs) {
      // P@k is always defined, but a debate with no positives for this
      // source is skipped for every metric so all six share one average.
      std::vector<std::optional<double>> per_debate;
      for (const auto& d : debates) {
        if (d.positives() == 0) continue;
        per_debate.push_back(metric_value(d, kAllMetrics[m]));
      }
      per_run.push_back(mean_defined(per_debate));
    }
    row[m] = mean_defined(per_run);
  }
  return row;
}

MetricRow MetricReport::average() const {
  MetricRow avg;
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    std::vector<std::optional<double>> xs;
    for (const auto& [src, row] : rows) xs.push_back(row[m]);
    avg[m] = mean_defined(xs);
  }
  return avg;
}

std::string MetricReport::seed_set() const {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(seeds[i]);
  }
  return out;
}

void write_metrics_csv(const MetricReport& report, std::ostream& out) {
  out << "source,metric,value,variant,seed_set\n";
  auto emit = [&](std::string_view src, const MetricRow& row) {
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      out << src << ',' << kMetricNames[m] << ',';
      if (row[m]) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *row[m]);
        out << buf;
      }
      out << ',' << report.variant << ',' << report.seed_set() << '\n';
    }
  };
  for (const auto& [src, row] : report.rows) emit(source_name(src), row);
  emit("AVG", report.average());
}

std::vector<MetricReport> read_metrics_csv(std::istream& in) {
  std::vector<MetricReport> reports;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (line.rfind("source,metric,", 0) == 0) continue;  // header, possibly repeated
    auto f = split_csv(line);
    const std::string loc = "metrics line " + std::to_string(lineno);
    if (f.size() != 5) throw ParseError(loc + ": expected 5 fields");
    if (f[0] == "AVG") continue;  // derived
    auto src = parse_source(f[0]);
    auto metric = parse_metric(f[1]);
    if (!src || *src == Source::ANY) throw ParseError(loc + ": unknown source " + f[0]);
    if (!metric) throw ParseError(loc + ": unknown metric " + f[1]);

    auto it = std::find_if(reports.begin(), reports.end(),
                           [&](const MetricReport& r) { return r.variant == f[3]; });
    if (it == reports.end()) {
      MetricReport r;
      r.variant = f[3];
      std::istringstream seeds(f[4]);
      for (std::string s; std::getline(seeds, s, ';');)
        if (!s.empty()) r.seeds.push_back(std::stoull(s));
      reports.push_back(std::move(r));
      it = std::prev(reports.end());
    }
    auto& row = it->rows[*src];
    if (!f[2].empty()) {
      try {
        row[static_cast<std::size_t>(*metric)] = std::stod(f[2]);
      } catch (const std::exception&) {
        throw ParseError(loc + ": bad value '" + f[2] + "'");
      }
    }
  }
  return reports;
}

std::string format_value(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  std::string s(buf);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

}  // namespace cwrank
