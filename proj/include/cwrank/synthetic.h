#ifndef CWRANK_SYNTHETIC_H_
#define CWRANK_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "cwrank/annotations.h"
#include "cwrank/corpus.h"
#include "cwrank/features.h"

namespace cwrank {

// Generator for debate-shaped corpora with a planted check-worthiness
// signal, used for fixtures, smoke runs and property tests.
struct SyntheticConfig {
  std::size_t debates = 4;
  std::size_t sentences_per_debate = 120;
  std::size_t embedding_dim = 16;
  std::size_t topic_count = 5;
  double worthy_rate = 0.25;
  // All nine label columns copy one draw.
  bool identical_labels = false;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  Corpus corpus;
  AnnotationStore annotations;
};

SyntheticData make_synthetic(const SyntheticConfig& config);

// Small in-memory lexicons matching the generator's vocabulary.
LexiconSet synthetic_lexicons();

}  // namespace cwrank

#endif  // CWRANK_SYNTHETIC_H_
