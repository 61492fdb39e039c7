#ifndef CWRANK_CORPUS_H_
#define CWRANK_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwrank/source.h"

namespace cwrank {

using LabelRow = std::array<std::uint8_t, kNumSources>;

struct Sentence {
  std::string debate_id;
  int index = 0;  // 0-based position within the debate
  std::string speaker;
  std::string text;
  LabelRow labels{};

  bool label(Source s) const;  // ANY is the OR of the nine columns
  int selected_by() const;     // number of sources with a 1
};

struct Debate {
  std::string id;
  std::vector<Sentence> sentences;
};

// Ordered debates of ordered sentences. Rows are addressed either by
// (debate, position) or by a flat row id in corpus order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Debate> debates);

  const std::vector<Debate>& debates() const { return debates_; }
  std::size_t num_debates() const { return debates_.size(); }
  std::size_t num_sentences() const { return row_offsets_.back(); }

  const Sentence& row(std::size_t row_id) const;
  // First flat row id of debate `d`; rows of d are [offset(d), offset(d+1)).
  std::size_t debate_offset(std::size_t d) const { return row_offsets_[d]; }
  std::size_t debate_size(std::size_t d) const {
    return debates_[d].sentences.size();
  }
  std::size_t debate_of_row(std::size_t row_id) const;
  // Index in debates() or throws ConfigError.
  std::size_t find_debate(const std::string& id) const;

 private:
  std::vector<Debate> debates_;
  std::vector<std::size_t> row_offsets_{0};
};

// Reads the JSON Lines corpus format. Blank lines are ignored.
// Throws ParseError (with 1-based line number) or ValidationError.
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in, const std::string& origin = "<stream>");

void write_corpus(const Corpus& corpus, std::ostream& out);

// One entry per sentence in corpus order.
std::vector<std::uint8_t> derive_any_labels(const Corpus& corpus);

struct AgreementTable {
  // Index n in 0..9: sentences selected by exactly n / at least n sources.
  std::array<std::size_t, kNumSources + 1> exact{};
  std::array<std::size_t, kNumSources + 1> cumulative{};
};

AgreementTable agreement_table(const Corpus& corpus);

// Table with columns "selected by", "sentences", "cumulative", rows 9..1.
std::string format_agreement_table(const AgreementTable& table);

struct Fold {
  std::size_t test_debate = 0;  // index into Corpus::debates()
  std::string test_debate_id;
  std::vector<std::string> train_debate_ids;
  std::vector<std::size_t> train_rows;  // flat row ids, ascending
  std::vector<std::size_t> test_rows;
};

// Leave-one-debate-out folds, in debate order. Throws ConfigError for fewer
// than two debates.
std::vector<Fold> make_folds(const Corpus& corpus);

}  // namespace cwrank

#endif  // CWRANK_CORPUS_H_
