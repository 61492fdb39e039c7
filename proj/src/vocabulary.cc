#include "cwrank/vocabulary.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cwrank/error.h"
#include "cwrank/text.h"

namespace cwrank {

Vocabulary Vocabulary::build(const std::vector<const Sentence*>& docs,
                             const VocabConfig& config) {
  if (docs.empty())
    throw ConfigError("cannot build a vocabulary from an empty training set");
  std::map<std::string, std::size_t> df;
  for (const Sentence* s : docs) {
    auto toks = tokenize(s->text);
    std::set<std::string> unique(toks.begin(), toks.end());
    for (const auto& t : unique) ++df[t];
  }

  Vocabulary v;
  v.config_ = config;
  v.document_count_ = docs.size();
  const double n = static_cast<double>(docs.size());
  for (const auto& [term, count] : df) {  // std::map: lexicographic order
    if (count < config.min_df) continue;
    const std::size_t col = v.terms_.size();
    v.terms_.push_back(term);
    v.idf_.push_back(std::log(n / (1.0 + static_cast<double>(count))) + 1.0);
    v.index_.emplace(term, Entry{col, count});
  }
  return v;
}

const Vocabulary::Entry* Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? nullptr : &it->second;
}

double Vocabulary::idf(const std::string& term) const {
  const Entry* e = find(term);
  return e ? idf_[e->column] : 0.0;
}

SparseVector Vocabulary::tfidf(const std::vector<std::string>& tokens) const {
  std::map<std::size_t, double> tf;
  for (const auto& t : tokens)
    if (const Entry* e = find(t)) tf[e->column] += 1.0;
  SparseVector out;
  out.reserve(tf.size());
  for (const auto& [col, count] : tf) out.emplace_back(col, count * idf_[col]);
  return out;
}

}  // namespace cwrank
