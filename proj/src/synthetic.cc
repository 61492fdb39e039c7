#include "cwrank/synthetic.h"

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace cwrank {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  bool chance(double p) { return uniform() < p; }
  double normal() {
    // Box-Muller, one value per call.
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string> kFiller = {
    "well", "i", "think", "we", "you", "the", "people", "country", "going",
    "to", "have", "really", "look", "know", "that", "is", "a", "great", "and",
    "very", "thank", "so", "believe", "said", "about", "our", "folks"};

const std::vector<std::string> kWorthy = {
    "jobs", "tax", "debt", "percent", "million", "billion", "trillion",
    "plan", "deficit", "crime", "wages", "trade", "deal", "economy",
    "voted", "lost", "increase", "cut", "cost", "spent"};

const std::vector<std::string> kNumbers = {"5", "10", "3", "20", "2015", "$6", "12"};

const std::vector<std::string> kEntities = {
    "China", "Mexico", "Iraq", "ISIS", "NAFTA", "Chicago", "Russia", "Putin"};

const std::vector<std::string> kCheap = {
    "wrong", "thank you", "excuse me", "that is right", "go ahead",
    "it is real", "believe me", "let me respond"};

// Selection probability of a check-worthy sentence, per source.
constexpr std::array<double, kNumSources> kSourceRecall = {
    0.35, 0.45, 0.40, 0.45, 0.50, 0.75, 0.45, 0.40, 0.45};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticConfig& config) {
  Rng rng(config.seed);
  const std::size_t D = config.embedding_dim;
  const std::size_t K = config.topic_count;

  std::vector<double> worthy_dir(D);
  for (double& x : worthy_dir) x = rng.normal();

  std::vector<Debate> debates;
  std::vector<Annotation> annotations;
  const std::array<std::array<const char*, 3>, 2> casts = {{
      {"CLINTON", "TRUMP", "HOLT"},
      {"KAINE", "PENCE", "QUIJANO"},
  }};

  for (std::size_t d = 0; d < config.debates; ++d) {
    Debate debate;
    debate.id = "debate" + std::to_string(d + 1);
    const auto& cast = casts[d == 1 ? 1 : 0];
    std::size_t speaker = 2;
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < config.sentences_per_debate; ++i) {
      if (remaining == 0) {
        speaker = speaker == 2 ? rng.below(2) : (rng.chance(0.15) ? 2 : 1 - speaker);
        remaining = speaker == 2 ? 1 + rng.below(2) : 1 + rng.below(6);
      }
      --remaining;

      const bool moderator = speaker == 2;
      const bool worthy = !moderator && rng.chance(config.worthy_rate);
      const bool cheap = !worthy && rng.chance(0.2);

      std::vector<std::string> words;
      bool has_entity = false, has_number = false;
      if (cheap) {
        words.push_back(rng.pick(kCheap));
      } else {
        const std::size_t len = 6 + rng.below(10);
        for (std::size_t w = 0; w < len; ++w) {
          const double u = rng.uniform();
          if (worthy && u < 0.30) {
            words.push_back(rng.pick(kWorthy));
          } else if (worthy && u < 0.42) {
            words.push_back(rng.pick(kNumbers));
            has_number = true;
          } else if (worthy && u < 0.50) {
            words.push_back(rng.pick(kEntities));
            has_entity = true;
          } else if (!worthy && u < 0.04) {
            words.push_back(rng.pick(kWorthy));
          } else {
            words.push_back(rng.pick(kFiller));
          }
        }
        if (worthy && rng.chance(0.3)) words.insert(words.begin() + 1, "never");
        if (rng.chance(0.1)) words.push_back(speaker == 0 ? "Donald" : "Hillary");
      }
      std::string text;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) text += ' ';
        text += w == 0 ? capitalize(words[w]) : words[w];
      }
      text += worthy && rng.chance(0.5) ? "!" : ".";

      Sentence s;
      s.debate_id = debate.id;
      s.index = static_cast<int>(i);
      s.speaker = cast[speaker];
      s.text = text;
      if (config.identical_labels) {
        const bool pick = worthy ? rng.chance(0.5) : rng.chance(0.01);
        s.labels.fill(pick ? 1 : 0);
      } else {
        for (std::size_t src = 0; src < kNumSources; ++src)
          s.labels[src] = (worthy ? rng.chance(kSourceRecall[src]) : rng.chance(0.008)) ? 1 : 0;
      }
      debate.sentences.push_back(std::move(s));

      Annotation a;
      const auto toks = tokenize(text);
      for (const auto& t : toks) {
        const bool digit = t.find_first_of("0123456789") != std::string::npos;
        a.pos_counts[digit ? 6 : (t.size() > 4 ? 5 : 9)] += 1;
      }
      a.ner_flags[0] = rng.chance(0.1) ? 1 : 0;
      a.ner_flags[2] = has_entity ? 1 : 0;
      a.ner_flags[1] = has_entity && rng.chance(0.3) ? 1 : 0;
      a.ner_count = a.ner_flags[0] + a.ner_flags[1] + a.ner_flags[2];
      a.sentiment = std::tanh(0.5 * rng.normal() + (has_number ? -0.2 : 0.1));

      a.topics.resize(K);
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        a.topics[k] = std::exp(rng.normal() + (worthy && k == 0 ? 1.0 : 0.0));
        sum += a.topics[k];
      }
      for (double& p : a.topics) p /= sum;
      sum = 0.0;
      for (std::size_t k = 0; k + 1 < K; ++k) sum += a.topics[k];
      a.topics[K - 1] = 1.0 - sum;

      a.embedding.resize(D);
      for (std::size_t k = 0; k < D; ++k)
        a.embedding[k] = 0.6 * rng.normal() + (worthy ? 0.5 * worthy_dir[k] : 0.0);
      a.discourse_prev = i == 0 ? 0 : 1 + rng.below(kDiscourseRelations.size() - 1);
      a.discourse_next = i + 1 == config.sentences_per_debate
                             ? 0
                             : 1 + rng.below(kDiscourseRelations.size() - 1);
      annotations.push_back(std::move(a));
    }
    debates.push_back(std::move(debate));
  }
  return SyntheticData{Corpus(std::move(debates)),
                       AnnotationStore(std::move(annotations), K, D)};
}

LexiconSet synthetic_lexicons() {
  LexiconSet set;
  set.linguistic.emplace_back("bias", std::vector<std::string>{"believe me", "disaster", "terrible", "wrong"});
  set.linguistic.emplace_back("assertive", std::vector<std::string>{"said", "think", "believe", "know"});
  set.linguistic.emplace_back("subjective", std::vector<std::string>{"great", "very", "really"});
  set.sentiment.emplace_back("positive", std::vector<std::string>{"great", "thank", "right"});
  set.sentiment.emplace_back("negative", std::vector<std::string>{"lost", "crime", "wrong", "cut"});
  return set;
}

}  // namespace cwrank
