#include "cwrank/annotations.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <utility>

#include <json.hpp>

#include "cwrank/error.h"

namespace cwrank {
namespace {

using nlohmann::json;

std::string key_str(const std::string& debate, long long index) {
  return "(" + debate + ", " + std::to_string(index) + ")";
}

double finite_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(what + " must be finite");
  return x;
}

std::vector<double> number_array(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) out.push_back(finite_number(x, what + " entry"));
  return out;
}

const json& require(const json& rec, const char* name, const std::string& ctx) {
  auto it = rec.find(name);
  if (it == rec.end())
    throw ValidationError(ctx + ": missing field '" + name + "'");
  return *it;
}

Annotation parse_annotation(const json& rec, const std::string& ctx) {
  Annotation a;

  const json& pos = require(rec, "pos_counts", ctx);
  if (!pos.is_object())
    throw ValidationError(ctx + ": 'pos_counts' must be an object");
  for (const auto& [tag, count] : pos.items()) {
    std::size_t slot = kPosTags.size();
    for (std::size_t i = 0; i < kPosTags.size(); ++i)
      if (kPosTags[i] == tag) slot = i;
    if (slot == kPosTags.size())
      throw ValidationError(ctx + ": unknown POS tag '" + tag + "'");
    if (!count.is_number_integer() || count.get<long long>() < 0)
      throw ValidationError(ctx + ": POS count for '" + tag +
                            "' must be a non-negative integer");
    a.pos_counts[slot] = static_cast<double>(count.get<long long>());
  }

  const json& ner = require(rec, "ner", ctx);
  if (!ner.is_object()) throw ValidationError(ctx + ": 'ner' must be an object");
  for (std::size_t i = 0; i < kNerClasses.size(); ++i) {
    const json& f = require(ner, std::string(kNerClasses[i]).c_str(), ctx + " ner");
    if (!f.is_number_integer() || (f.get<long long>() != 0 && f.get<long long>() != 1))
      throw ValidationError(ctx + ": ner flag " + std::string(kNerClasses[i]) +
                            " must be 0 or 1");
    a.ner_flags[i] = static_cast<std::uint8_t>(f.get<long long>());
  }
  const json& count = require(ner, "count", ctx + " ner");
  if (!count.is_number_integer() || count.get<long long>() < 0)
    throw ValidationError(ctx + ": ner count must be a non-negative integer");
  a.ner_count = static_cast<double>(count.get<long long>());

  a.sentiment = finite_number(require(rec, "sentiment", ctx), ctx + ": sentiment");
  if (a.sentiment < -1.0 || a.sentiment > 1.0)
    throw ValidationError(ctx + ": sentiment outside [-1, 1]");

  a.topics = number_array(require(rec, "topics", ctx), ctx + ": topics");
  if (a.topics.empty()) throw ValidationError(ctx + ": topics vector is empty");
  double sum = 0.0;
  for (double p : a.topics) {
    if (p < 0.0) throw ValidationError(ctx + ": negative topic probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError(ctx + ": topic vector sums to " + std::to_string(sum) +
                          ", expected 1");

  a.embedding = number_array(require(rec, "embedding", ctx), ctx + ": embedding");
  if (a.embedding.empty())
    throw ValidationError(ctx + ": embedding vector is empty");

  for (auto [field, slot] : {std::pair{"discourse_prev", &a.discourse_prev},
                             std::pair{"discourse_next", &a.discourse_next}}) {
    const json& rel = require(rec, field, ctx);
    if (!rel.is_string())
      throw ValidationError(ctx + ": '" + field + "' must be a string");
    *slot = discourse_index(rel.get<std::string>());
    if (*slot == std::string::npos)
      throw ValidationError(ctx + ": unknown discourse relation '" +
                            rel.get<std::string>() + "'");
  }
  return a;
}

}  // namespace

std::size_t discourse_index(std::string_view relation) {
  for (std::size_t i = 0; i < kDiscourseRelations.size(); ++i)
    if (kDiscourseRelations[i] == relation) return i;
  return std::string::npos;
}

AnnotationStore::AnnotationStore(std::vector<Annotation> rows,
                                 std::size_t topic_count,
                                 std::size_t embedding_dim)
    : rows_(std::move(rows)),
      topic_count_(topic_count),
      embedding_dim_(embedding_dim) {
  for (const Annotation& a : rows_) {
    if (a.topics.size() != topic_count_ || a.embedding.size() != embedding_dim_)
      throw ValidationError("annotation vectors have inconsistent lengths");
  }
}

AnnotationStore read_annotations(std::istream& in, const Corpus& corpus,
                                 const std::string& origin) {
  std::map<std::pair<std::string, long long>, std::size_t> row_of;
  for (std::size_t r = 0; r < corpus.num_sentences(); ++r) {
    const Sentence& s = corpus.row(r);
    row_of.emplace(std::pair{s.debate_id, static_cast<long long>(s.index)}, r);
  }

  std::vector<std::optional<Annotation>> rows(corpus.num_sentences());
  std::optional<std::size_t> topic_count, embedding_dim;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string loc = origin + ":" + std::to_string(lineno);

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(loc + ": malformed JSON: " + e.what());
    }
    if (!rec.is_object()) throw ParseError(loc + ": record is not an object");
    const json& debate = require(rec, "debate_id", loc);
    const json& index = require(rec, "index", loc);
    if (!debate.is_string() || !index.is_number_integer())
      throw ValidationError(loc + ": bad debate_id/index");
    const std::string key =
        key_str(debate.get<std::string>(), index.get<long long>());
    const std::string ctx = loc + " " + key;

    auto it = row_of.find({debate.get<std::string>(), index.get<long long>()});
    if (it == row_of.end())
      throw ValidationError(ctx + ": no such sentence in the corpus");
    if (rows[it->second])
      throw ValidationError(ctx + ": duplicate annotation record");

    Annotation a = parse_annotation(rec, ctx);
    if (!topic_count) topic_count = a.topics.size();
    if (!embedding_dim) embedding_dim = a.embedding.size();
    if (a.topics.size() != *topic_count)
      throw ValidationError(ctx + ": topic vector length " +
                            std::to_string(a.topics.size()) + ", expected " +
                            std::to_string(*topic_count));
    if (a.embedding.size() != *embedding_dim)
      throw ValidationError(ctx + ": embedding length " +
                            std::to_string(a.embedding.size()) + ", expected " +
                            std::to_string(*embedding_dim));
    rows[it->second] = std::move(a);
  }

  std::vector<std::string> missing;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r]) {
      const Sentence& s = corpus.row(r);
      missing.push_back(key_str(s.debate_id, s.index));
    }
  }
  if (!missing.empty()) {
    std::string msg = origin + ": annotations missing for " +
                      std::to_string(missing.size()) + " sentence(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i)
      msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw ValidationError(msg);
  }

  std::vector<Annotation> out;
  out.reserve(rows.size());
  for (auto& a : rows) out.push_back(std::move(*a));
  return AnnotationStore(std::move(out), topic_count.value_or(0),
                         embedding_dim.value_or(0));
}

AnnotationStore ingest_annotations(const std::filesystem::path& path,
                                   const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open annotation file " + path.string());
  return read_annotations(in, corpus, path.string());
}

std::string annotation_record_json(const Sentence& s, const Annotation& a) {
  json pos = json::object();
  for (std::size_t i = 0; i < kPosTags.size(); ++i)
    if (a.pos_counts[i] > 0)
      pos[std::string(kPosTags[i])] = static_cast<long long>(a.pos_counts[i]);
  json ner = json::object();
  for (std::size_t i = 0; i < kNerClasses.size(); ++i)
    ner[std::string(kNerClasses[i])] = a.ner_flags[i];
  ner["count"] = static_cast<long long>(a.ner_count);
  json rec = {{"debate_id", s.debate_id},
              {"index", s.index},
              {"pos_counts", pos},
              {"ner", ner},
              {"sentiment", a.sentiment},
              {"topics", a.topics},
              {"embedding", a.embedding},
              {"discourse_prev", std::string(kDiscourseRelations[a.discourse_prev])},
              {"discourse_next", std::string(kDiscourseRelations[a.discourse_next])}};
  return rec.dump();
}

}  // namespace cwrank
