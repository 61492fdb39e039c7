#ifndef CWRANK_VOCABULARY_H_
#define CWRANK_VOCABULARY_H_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cwrank/corpus.h"

namespace cwrank {

struct VocabConfig {
  std::size_t min_df = 3;
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Bag-of-words vocabulary fitted on training sentences.
// idf(t) = ln(N / (1 + df(t))) + 1, N = number of training documents.
class Vocabulary {
 public:
  struct Entry {
    std::size_t column;
    std::size_t df;
  };

  Vocabulary() = default;

  // Throws ConfigError if `docs` is empty.
  static Vocabulary build(const std::vector<const Sentence*>& docs,
                          const VocabConfig& config = {});

  std::size_t size() const { return terms_.size(); }
  std::size_t document_count() const { return document_count_; }
  const VocabConfig& config() const { return config_; }

  const Entry* find(const std::string& term) const;
  double idf(const std::string& term) const;  // 0 for unknown terms
  const std::string& term(std::size_t column) const { return terms_[column]; }

  // tf * idf per in-vocabulary term, sorted by column. OOV terms ignored.
  SparseVector tfidf(const std::vector<std::string>& tokens) const;

 private:
  VocabConfig config_;
  std::size_t document_count_ = 0;
  std::vector<std::string> terms_;  // column -> term, lexicographic
  std::vector<double> idf_;         // column -> idf
  std::unordered_map<std::string, Entry> index_;
};

}  // namespace cwrank

#endif  // CWRANK_VOCABULARY_H_
