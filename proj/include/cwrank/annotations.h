#ifndef CWRANK_ANNOTATIONS_H_
#define CWRANK_ANNOTATIONS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cwrank/corpus.h"

namespace cwrank {

// Coarse universal part-of-speech tag set accepted in `pos_counts`.
inline constexpr std::array<std::string_view, 12> kPosTags = {
    "ADJ", "ADP", "ADV", "CONJ", "DET", "NOUN",
    "NUM", "PRON", "PRT", "VERB", ".", "X"};

inline constexpr std::array<std::string_view, 4> kNerClasses = {
    "PER", "ORG", "LOC", "MISC"};

// Closed discourse relation set; "none" marks a missing neighbour.
inline constexpr std::array<std::string_view, 19> kDiscourseRelations = {
    "none",        "Attribution", "Background",  "Cause",
    "Comparison",  "Condition",   "Contrast",    "Elaboration",
    "Enablement",  "Evaluation",  "Explanation", "Joint",
    "Manner-Means", "Same-Unit",  "Summary",     "Temporal",
    "Textual-Organization", "Topic-Change", "Topic-Comment"};

struct Annotation {
  std::array<double, kPosTags.size()> pos_counts{};
  std::array<std::uint8_t, kNerClasses.size()> ner_flags{};
  double ner_count = 0.0;
  double sentiment = 0.0;  // [-1, 1]
  std::vector<double> topics;
  std::vector<double> embedding;
  std::size_t discourse_prev = 0;  // index into kDiscourseRelations
  std::size_t discourse_next = 0;
};

// Sidecar annotations aligned with a corpus: record i belongs to corpus
// row i.
class AnnotationStore {
 public:
  AnnotationStore() = default;
  AnnotationStore(std::vector<Annotation> rows, std::size_t topic_count,
                  std::size_t embedding_dim);

  const Annotation& row(std::size_t row_id) const { return rows_[row_id]; }
  std::size_t size() const { return rows_.size(); }
  std::size_t topic_count() const { return topic_count_; }
  std::size_t embedding_dim() const { return embedding_dim_; }

 private:
  std::vector<Annotation> rows_;
  std::size_t topic_count_ = 0;
  std::size_t embedding_dim_ = 0;
};

// Reads the sidecar JSON Lines file; lines starting with '#' are header
// comments. Every corpus sentence must have exactly one record.
// Throws ParseError / ValidationError naming the offending record.
AnnotationStore ingest_annotations(const std::filesystem::path& path,
                                   const Corpus& corpus);
AnnotationStore read_annotations(std::istream& in, const Corpus& corpus,
                                 const std::string& origin = "<stream>");

// Serializes one record in the sidecar schema (used by fixture tools).
std::string annotation_record_json(const Sentence& s, const Annotation& a);

std::size_t discourse_index(std::string_view relation);  // npos if unknown

}  // namespace cwrank

#endif  // CWRANK_ANNOTATIONS_H_
