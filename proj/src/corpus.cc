#include "cwrank/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "cwrank/error.h"

namespace cwrank {
namespace {

using nlohmann::json;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string where(const std::string& origin, std::size_t line) {
  return origin + ":" + std::to_string(line);
}

Sentence parse_record(const std::string& line, const std::string& loc) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(loc + ": malformed JSON: " + e.what());
  }
  if (!rec.is_object()) throw ParseError(loc + ": record is not an object");

  auto field = [&](const char* name) -> const json& {
    auto it = rec.find(name);
    if (it == rec.end())
      throw ValidationError(loc + ": missing field '" + name + "'");
    return *it;
  };

  Sentence s;
  const json& debate = field("debate_id");
  const json& index = field("index");
  const json& speaker = field("speaker");
  const json& text = field("text");
  const json& labels = field("labels");
  if (!debate.is_string() || debate.get<std::string>().empty())
    throw ValidationError(loc + ": 'debate_id' must be a non-empty string");
  if (!index.is_number_integer() || index.get<long long>() < 0)
    throw ValidationError(loc + ": 'index' must be a non-negative integer");
  if (!speaker.is_string())
    throw ValidationError(loc + ": 'speaker' must be a string");
  if (!text.is_string()) throw ValidationError(loc + ": 'text' must be a string");
  s.debate_id = debate.get<std::string>();
  s.index = static_cast<int>(index.get<long long>());
  s.speaker = speaker.get<std::string>();
  s.text = text.get<std::string>();
  if (blank(s.text))
    throw ValidationError(loc + ": empty text for (" + s.debate_id + ", " +
                          std::to_string(s.index) + ")");

  if (!labels.is_object() || labels.size() != kNumSources)
    throw ValidationError(loc + ": 'labels' of (" + s.debate_id + ", " +
                          std::to_string(s.index) +
                          ") must be an object with exactly 9 source keys");
  for (Source src : kRealSources) {
    auto it = labels.find(std::string(source_name(src)));
    if (it == labels.end())
      throw ValidationError(loc + ": 'labels' missing source " +
                            std::string(source_name(src)));
    if (!it->is_number_integer() ||
        (it->get<long long>() != 0 && it->get<long long>() != 1))
      throw ValidationError(loc + ": label " + std::string(source_name(src)) +
                            " must be 0 or 1");
    s.labels[column(src)] = static_cast<std::uint8_t>(it->get<long long>());
  }
  return s;
}

}  // namespace

bool Sentence::label(Source s) const {
  if (s == Source::ANY) return selected_by() > 0;
  return labels[column(s)] != 0;
}

int Sentence::selected_by() const {
  int n = 0;
  for (auto l : labels) n += l;
  return n;
}

Corpus::Corpus(std::vector<Debate> debates) : debates_(std::move(debates)) {
  std::unordered_set<std::string> ids;
  for (const Debate& d : debates_) {
    if (!ids.insert(d.id).second)
      throw ValidationError("duplicate debate id '" + d.id + "'");
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
      const Sentence& s = d.sentences[i];
      if (s.debate_id != d.id || s.index != static_cast<int>(i))
        throw ValidationError("debate '" + d.id +
                              "': sentence indices must run 0..n-1 in order");
      for (auto l : s.labels)
        if (l > 1) throw ValidationError("label outside {0,1} in '" + d.id + "'");
    }
    row_offsets_.push_back(row_offsets_.back() + d.sentences.size());
  }
}

const Sentence& Corpus::row(std::size_t row_id) const {
  std::size_t d = debate_of_row(row_id);
  return debates_[d].sentences[row_id - row_offsets_[d]];
}

std::size_t Corpus::debate_of_row(std::size_t row_id) const {
  auto it = std::upper_bound(row_offsets_.begin(), row_offsets_.end(), row_id);
  if (row_id >= num_sentences()) throw std::out_of_range("row id out of range");
  return static_cast<std::size_t>(it - row_offsets_.begin()) - 1;
}

std::size_t Corpus::find_debate(const std::string& id) const {
  for (std::size_t d = 0; d < debates_.size(); ++d)
    if (debates_[d].id == id) return d;
  throw ConfigError("unknown debate '" + id + "'");
}

Corpus read_corpus(std::istream& in, const std::string& origin) {
  std::vector<Debate> debates;
  std::unordered_set<std::string> closed;  // debates already finished
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::string loc = where(origin, lineno);
    Sentence s = parse_record(line, loc);

    if (debates.empty() || debates.back().id != s.debate_id) {
      if (!debates.empty()) closed.insert(debates.back().id);
      if (closed.count(s.debate_id))
        throw ValidationError(loc + ": records of debate '" + s.debate_id +
                              "' are not contiguous");
      debates.push_back(Debate{s.debate_id, {}});
    }
    auto& sentences = debates.back().sentences;
    const int expected = static_cast<int>(sentences.size());
    if (s.index < expected)
      throw ValidationError(loc + ": duplicate sentence (" + s.debate_id +
                            ", " + std::to_string(s.index) + ")");
    if (s.index != expected)
      throw ValidationError(loc + ": expected index " +
                            std::to_string(expected) + " in debate '" +
                            s.debate_id + "', got " + std::to_string(s.index));
    sentences.push_back(std::move(s));
  }
  return Corpus(std::move(debates));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  return read_corpus(in, path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Debate& d : corpus.debates()) {
    for (const Sentence& s : d.sentences) {
      json labels = json::object();
      for (Source src : kRealSources)
        labels[std::string(source_name(src))] = s.labels[column(src)];
      json rec = {{"debate_id", s.debate_id},
                  {"index", s.index},
                  {"speaker", s.speaker},
                  {"text", s.text},
                  {"labels", labels}};
      out << rec.dump() << '\n';
    }
  }
}

std::vector<std::uint8_t> derive_any_labels(const Corpus& corpus) {
  std::vector<std::uint8_t> any;
  any.reserve(corpus.num_sentences());
  for (const Debate& d : corpus.debates())
    for (const Sentence& s : d.sentences)
      any.push_back(s.selected_by() > 0 ? 1 : 0);
  return any;
}

AgreementTable agreement_table(const Corpus& corpus) {
  AgreementTable t;
  for (const Debate& d : corpus.debates())
    for (const Sentence& s : d.sentences) ++t.exact[s.selected_by()];
  std::size_t running = 0;
  for (std::size_t n = kNumSources; n >= 1; --n) {
    running += t.exact[n];
    t.cumulative[n] = running;
  }
  // cumulative[0] counts every sentence.
  t.cumulative[0] = running + t.exact[0];
  return t;
}

std::string format_agreement_table(const AgreementTable& table) {
  std::ostringstream os;
  os << std::setw(11) << "selected by" << std::setw(11) << "sentences"
     << std::setw(12) << "cumulative" << '\n';
  for (std::size_t n = kNumSources; n >= 1; --n) {
    os << std::setw(11) << n << std::setw(11) << table.exact[n]
       << std::setw(12) << table.cumulative[n] << '\n';
  }
  return os.str();
}

std::vector<Fold> make_folds(const Corpus& corpus) {
  if (corpus.num_debates() < 2)
    throw ConfigError("cross-validation needs at least 2 debates, corpus has " +
                      std::to_string(corpus.num_debates()));
  std::vector<Fold> folds;
  for (std::size_t t = 0; t < corpus.num_debates(); ++t) {
    Fold f;
    f.test_debate = t;
    f.test_debate_id = corpus.debates()[t].id;
    for (std::size_t d = 0; d < corpus.num_debates(); ++d) {
      const std::size_t begin = corpus.debate_offset(d);
      auto& rows = d == t ? f.test_rows : f.train_rows;
      for (std::size_t r = begin; r < begin + corpus.debate_size(d); ++r)
        rows.push_back(r);
      if (d != t) f.train_debate_ids.push_back(corpus.debates()[d].id);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

}  // namespace cwrank
