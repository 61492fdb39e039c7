#include "cwrank/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "cwrank/error.h"

namespace cwrank {
namespace {

constexpr std::array<std::string_view, kNumFeatureGroups> kGroupNames = {
    "Embeddings",  "Metadata", "Sentiment",  "Topics",
    "Discourse",   "NER",      "SegmentSize", "Position",
    "Linguistic",  "Contradiction", "Lengths", "SimToPrev"};

std::string squash(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == ' ' || c == '.' || c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool names_match(std::string_view speaker, const std::string& name) {
  const std::string target = lower(name);
  if (lower(speaker) == target) return true;
  for (const auto& tok : tokenize(speaker))
    if (tok == target) return true;
  return false;
}

const std::unordered_set<std::string> kNegations = {
    "not", "no", "never", "nobody", "nothing", "neither",
    "nor", "none", "nowhere", "cannot", "noone"};

// Counted only when followed by the token "t" (don't, can't, won't...).
const std::unordered_set<std::string> kNegatedStems = {
    "don",   "doesn", "didn",   "isn",    "aren",  "wasn",
    "weren", "won",   "wouldn", "couldn", "shouldn", "can",
    "hasn",  "haven", "hadn",   "ain",    "mustn", "needn"};

const std::unordered_set<std::string> kNumberWords = {
    "two",      "three",    "four",     "five",     "six",       "seven",
    "eight",    "nine",     "ten",      "eleven",   "twelve",    "twenty",
    "thirty",   "forty",    "fifty",    "sixty",    "seventy",   "eighty",
    "ninety",   "hundred",  "hundreds", "thousand", "thousands", "million",
    "millions", "billion",  "billions", "trillion", "trillions", "percent"};

const std::unordered_set<std::string> kDateWords = {
    "january", "february", "march",   "april",    "june",     "july",
    "august",  "september", "october", "november", "december", "monday",
    "tuesday", "wednesday", "thursday", "friday",  "saturday", "sunday",
    "today",   "tomorrow",  "yesterday", "tonight", "ago",     "decade",
    "decades", "century"};

bool has_digit(const std::string& t) {
  return std::any_of(t.begin(), t.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

bool all_digits(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

bool needs_annotations(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::kEmbeddings:
    case FeatureGroup::kSentiment:
    case FeatureGroup::kTopics:
    case FeatureGroup::kDiscourse:
    case FeatureGroup::kNER:
    case FeatureGroup::kLinguistic:
    case FeatureGroup::kSimToPrev:
      return true;
    default:
      return false;
  }
}

bool needs_lexicons(FeatureGroup g) {
  return g == FeatureGroup::kSentiment || g == FeatureGroup::kLinguistic;
}

std::span<const double> as_span(const std::vector<double>& v) {
  return {v.data(), v.size()};
}

}  // namespace

std::string_view group_name(FeatureGroup g) {
  return kGroupNames[static_cast<std::size_t>(g)];
}

std::optional<FeatureGroup> parse_group(std::string_view name) {
  const std::string key = squash(name);
  for (std::size_t i = 0; i < kGroupNames.size(); ++i)
    if (squash(kGroupNames[i]) == key) return static_cast<FeatureGroup>(i);
  return std::nullopt;
}

SpeakerRoles::Role SpeakerRoles::role(std::string_view speaker) const {
  for (const auto& c : candidates)
    if (names_match(speaker, c)) return kCandidate;
  for (const auto& m : moderators)
    if (names_match(speaker, m)) return kModerator;
  return kOther;
}

SpeakerRoles default_speaker_roles() {
  SpeakerRoles r;
  r.candidates = {"CLINTON", "TRUMP", "KAINE", "PENCE"};
  r.moderators = {"HOLT", "RADDATZ", "COOPER", "WALLACE", "QUIJANO", "MODERATOR"};
  r.aliases = {{"hillary", "CLINTON"},
               {"donald", "TRUMP"},
               {"tim", "KAINE"},
               {"mike", "PENCE"}};
  return r;
}

LexiconSet load_lexicon_dir(const std::filesystem::path& dir) {
  LexiconSet set;
  for (const char* name : {"bias", "assertive", "subjective"})
    set.linguistic.push_back(load_lexicon(dir / (std::string(name) + ".txt"), name));
  for (const char* name : {"positive", "negative"})
    set.sentiment.push_back(load_lexicon(dir / (std::string(name) + ".txt"), name));
  return set;
}

StructuralFeatures structural_features(const Debate& debate, std::size_t position,
                                       const SpeakerRoles& roles) {
  const auto& sents = debate.sentences;
  const std::size_t n = sents.size();
  StructuralFeatures f;
  f.debate_position =
      n > 1 ? static_cast<double>(position) / static_cast<double>(n - 1) : 0.0;

  const std::string& speaker = sents[position].speaker;
  std::size_t begin = position;
  while (begin > 0 && sents[begin - 1].speaker == speaker) --begin;
  std::size_t end = position + 1;
  while (end < n && sents[end].speaker == speaker) ++end;
  const std::size_t run = end - begin;
  f.intervention_length = static_cast<double>(run);
  f.intervention_position =
      run > 1 ? static_cast<double>(position - begin) / static_cast<double>(run - 1)
              : 0.0;

  const SpeakerRoles::Role role = roles.role(speaker);
  f.role[role] = 1.0;

  std::unordered_set<std::string> opponents;
  for (const auto& c : roles.candidates)
    if (!names_match(speaker, c)) opponents.insert(lower(c));
  for (const auto& [alias, who] : roles.aliases)
    if (opponents.count(lower(who))) opponents.insert(lower(alias));
  for (const auto& tok : tokenize(sents[position].text)) {
    if (opponents.count(tok)) {
      f.opponent_mention = 1.0;
      break;
    }
  }
  return f;
}

std::vector<double> lexicon_features(const std::vector<std::string>& tokens,
                                     std::span<const Lexicon> lexicons) {
  std::vector<double> out;
  out.reserve(2 * lexicons.size());
  const double n = static_cast<double>(tokens.size());
  for (const Lexicon& lex : lexicons) {
    const double count = static_cast<double>(lex.count_matches(tokens));
    out.push_back(count);
    out.push_back(n > 0 ? count / n : 0.0);
  }
  return out;
}

ContradictionCounts contradiction_features(const std::vector<std::string>& tokens) {
  ContradictionCounts c;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    const bool next_is_t = i + 1 < tokens.size() && tokens[i + 1] == "t";
    if (kNegations.count(t) || (next_is_t && kNegatedStems.count(t)))
      c.negations += 1.0;
    if (has_digit(t) || kNumberWords.count(t)) c.numerics += 1.0;
    bool date = kDateWords.count(t) > 0;
    if (all_digits(t) && t.size() == 4) {
      const int year = std::stoi(t);
      date = date || (year >= 1900 && year <= 2099);
    }
    if ((t == "am" || t == "pm") && i > 0 && all_digits(tokens[i - 1]))
      date = true;
    if (date) c.dates += 1.0;
  }
  return c;
}

double sim_to_checked(std::span<const double> query,
                      const std::vector<std::span<const double>>& positives) {
  if (positives.empty()) return 0.0;
  Eigen::Map<const Eigen::VectorXd> q(query.data(),
                                      static_cast<Eigen::Index>(query.size()));
  const double qn = q.norm();
  double best = -1.0;
  for (const auto& p : positives) {
    if (p.size() != query.size())
      throw std::invalid_argument("sim_to_checked: embedding length mismatch");
    Eigen::Map<const Eigen::VectorXd> v(p.data(), static_cast<Eigen::Index>(p.size()));
    const double vn = v.norm();
    const double cos = (qn > 0.0 && vn > 0.0) ? q.dot(v) / (qn * vn) : 0.0;
    best = std::max(best, std::clamp(cos, -1.0, 1.0));
  }
  return best;
}

FittedExtractors fit_extractors(const Corpus& corpus,
                                const FeatureResources& resources,
                                std::span<const std::size_t> train_rows) {
  FittedExtractors fitted;
  std::vector<const Sentence*> docs;
  docs.reserve(train_rows.size());
  for (std::size_t r : train_rows) {
    const Sentence& s = corpus.row(r);
    docs.push_back(&s);
    if (s.selected_by() > 0) fitted.positive_rows.push_back(r);
  }
  fitted.vocab = Vocabulary::build(docs, resources.vocab);
  return fitted;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& values,
                               std::span<const std::size_t> rows) {
  const Eigen::Index cols = values.cols();
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(cols);
  s.scale = Eigen::VectorXd::Ones(cols);
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (std::size_t r : rows) s.mean += values.row(static_cast<Eigen::Index>(r)).transpose();
  s.mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(cols);
  for (std::size_t r : rows) {
    const Eigen::VectorXd d =
        values.row(static_cast<Eigen::Index>(r)).transpose() - s.mean;
    var += d.cwiseProduct(d);
  }
  var /= n;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double sd = std::sqrt(var[c]);
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(Eigen::MatrixXd& values) const {
  values.rowwise() -= mean.transpose();
  values.array().rowwise() /= scale.transpose().array();
}

std::size_t group_width(FeatureGroup g, const FeatureResources& resources,
                        const FittedExtractors& fitted) {
  if (needs_annotations(g) && resources.annotations == nullptr)
    throw ConfigError("feature group " + std::string(group_name(g)) +
                      " requires sidecar annotations");
  if (needs_lexicons(g) && !resources.lexicons.loaded())
    throw ConfigError("feature group " + std::string(group_name(g)) +
                      " requires lexicon files");
  const AnnotationStore* a = resources.annotations;
  switch (g) {
    case FeatureGroup::kEmbeddings: return a->embedding_dim();
    case FeatureGroup::kMetadata: return 4;
    case FeatureGroup::kSentiment: return 1 + 2 * resources.lexicons.sentiment.size();
    case FeatureGroup::kTopics: return a->topic_count();
    case FeatureGroup::kDiscourse: return 2 * kDiscourseRelations.size();
    case FeatureGroup::kNER: return kNerClasses.size() + 1;
    case FeatureGroup::kSegmentSize: return 2;
    case FeatureGroup::kPosition: return 2;
    case FeatureGroup::kLinguistic:
      return fitted.vocab.size() + kPosTags.size() +
             2 * resources.lexicons.linguistic.size();
    case FeatureGroup::kContradiction: return 3;
    case FeatureGroup::kLengths: return 2;
    case FeatureGroup::kSimToPrev: return 1;
  }
  return 0;
}

namespace {

std::vector<std::string> group_column_names(FeatureGroup g,
                                            const FeatureResources& resources,
                                            const FittedExtractors& fitted,
                                            std::size_t width) {
  std::vector<std::string> names;
  const std::string prefix = std::string(group_name(g)) + ":";
  auto add = [&](const std::string& n) { names.push_back(prefix + n); };
  auto add_lex = [&](const std::vector<Lexicon>& lexs) {
    for (const auto& l : lexs) {
      add(l.name() + "_count");
      add(l.name() + "_ratio");
    }
  };
  switch (g) {
    case FeatureGroup::kMetadata:
      for (const char* n : {"candidate", "moderator", "other", "opponent_mention"}) add(n);
      break;
    case FeatureGroup::kSentiment:
      add("score");
      add_lex(resources.lexicons.sentiment);
      break;
    case FeatureGroup::kDiscourse:
      for (const char* side : {"prev_", "next_"})
        for (auto rel : kDiscourseRelations) add(side + std::string(rel));
      break;
    case FeatureGroup::kNER:
      for (auto c : kNerClasses) add(std::string(c));
      add("count");
      break;
    case FeatureGroup::kSegmentSize:
      add("length");
      add("log_length");
      break;
    case FeatureGroup::kPosition:
      add("debate");
      add("intervention");
      break;
    case FeatureGroup::kLinguistic:
      for (std::size_t c = 0; c < fitted.vocab.size(); ++c)
        add("tfidf_" + fitted.vocab.term(c));
      for (auto t : kPosTags) add("pos_" + std::string(t));
      add_lex(resources.lexicons.linguistic);
      break;
    case FeatureGroup::kContradiction:
      for (const char* n : {"negations", "numerics", "dates"}) add(n);
      break;
    case FeatureGroup::kLengths:
      add("tokens");
      add("chars");
      break;
    case FeatureGroup::kSimToPrev:
      add("max_cosine");
      break;
    default:
      for (std::size_t i = 0; i < width; ++i) add(std::to_string(i));
  }
  return names;
}

}  // namespace

FeatureMatrix raw_features(const Corpus& corpus, const FeatureResources& resources,
                           const GroupSet& groups, const FittedExtractors& fitted,
                           std::span<const std::size_t> train_rows) {
  FeatureMatrix m;
  std::size_t width = 0;
  for (std::size_t gi = 0; gi < kNumFeatureGroups; ++gi) {
    if (!groups.test(gi)) continue;
    const auto g = static_cast<FeatureGroup>(gi);
    const std::size_t w = group_width(g, resources, fitted);
    m.spans[gi] = ColumnSpan{width, width + w};
    auto names = group_column_names(g, resources, fitted, w);
    m.column_names.insert(m.column_names.end(), names.begin(), names.end());
    width += w;
  }
  if (resources.annotations && resources.annotations->size() != corpus.num_sentences())
    throw ConfigError("annotation store does not match the corpus");

  const auto n = static_cast<Eigen::Index>(corpus.num_sentences());
  m.values = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(width));

  std::vector<std::span<const double>> positives;
  std::vector<std::size_t> positive_ids;
  std::unordered_set<std::size_t> train_set(train_rows.begin(), train_rows.end());
  if (m.spans[group_bit(FeatureGroup::kSimToPrev)]) {
    for (std::size_t r : fitted.positive_rows) {
      positives.push_back(as_span(resources.annotations->row(r).embedding));
      positive_ids.push_back(r);
    }
  }

  for (std::size_t d = 0; d < corpus.num_debates(); ++d) {
    const Debate& debate = corpus.debates()[d];
    for (std::size_t i = 0; i < debate.sentences.size(); ++i) {
      const std::size_t r = corpus.debate_offset(d) + i;
      const Sentence& s = debate.sentences[i];
      const auto tokens = tokenize(s.text);
      const Annotation* ann =
          resources.annotations ? &resources.annotations->row(r) : nullptr;
      auto row = m.values.row(static_cast<Eigen::Index>(r));

      auto put = [&](FeatureGroup g, std::size_t offset, double v) {
        row[static_cast<Eigen::Index>(m.spans[group_bit(g)]->begin + offset)] = v;
      };
      auto want = [&](FeatureGroup g) { return m.spans[group_bit(g)].has_value(); };

      if (want(FeatureGroup::kEmbeddings))
        for (std::size_t k = 0; k < ann->embedding.size(); ++k)
          put(FeatureGroup::kEmbeddings, k, ann->embedding[k]);

      StructuralFeatures st;
      if (want(FeatureGroup::kMetadata) || want(FeatureGroup::kSegmentSize) ||
          want(FeatureGroup::kPosition))
        st = structural_features(debate, i, resources.roles);
      if (want(FeatureGroup::kMetadata)) {
        for (std::size_t k = 0; k < 3; ++k) put(FeatureGroup::kMetadata, k, st.role[k]);
        put(FeatureGroup::kMetadata, 3, st.opponent_mention);
      }
      if (want(FeatureGroup::kSentiment)) {
        put(FeatureGroup::kSentiment, 0, ann->sentiment);
        auto lex = lexicon_features(tokens, resources.lexicons.sentiment);
        for (std::size_t k = 0; k < lex.size(); ++k)
          put(FeatureGroup::kSentiment, 1 + k, lex[k]);
      }
      if (want(FeatureGroup::kTopics))
        for (std::size_t k = 0; k < ann->topics.size(); ++k)
          put(FeatureGroup::kTopics, k, ann->topics[k]);
      if (want(FeatureGroup::kDiscourse)) {
        put(FeatureGroup::kDiscourse, ann->discourse_prev, 1.0);
        put(FeatureGroup::kDiscourse, kDiscourseRelations.size() + ann->discourse_next,
            1.0);
      }
      if (want(FeatureGroup::kNER)) {
        for (std::size_t k = 0; k < kNerClasses.size(); ++k)
          put(FeatureGroup::kNER, k, ann->ner_flags[k]);
        put(FeatureGroup::kNER, kNerClasses.size(), ann->ner_count);
      }
      if (want(FeatureGroup::kSegmentSize)) {
        put(FeatureGroup::kSegmentSize, 0, st.intervention_length);
        put(FeatureGroup::kSegmentSize, 1, std::log(st.intervention_length));
      }
      if (want(FeatureGroup::kPosition)) {
        put(FeatureGroup::kPosition, 0, st.debate_position);
        put(FeatureGroup::kPosition, 1, st.intervention_position);
      }
      if (want(FeatureGroup::kLinguistic)) {
        for (const auto& [col, v] : fitted.vocab.tfidf(tokens))
          put(FeatureGroup::kLinguistic, col, v);
        const std::size_t pos0 = fitted.vocab.size();
        for (std::size_t k = 0; k < kPosTags.size(); ++k)
          put(FeatureGroup::kLinguistic, pos0 + k, ann->pos_counts[k]);
        auto lex = lexicon_features(tokens, resources.lexicons.linguistic);
        for (std::size_t k = 0; k < lex.size(); ++k)
          put(FeatureGroup::kLinguistic, pos0 + kPosTags.size() + k, lex[k]);
      }
      if (want(FeatureGroup::kContradiction)) {
        const auto c = contradiction_features(tokens);
        put(FeatureGroup::kContradiction, 0, c.negations);
        put(FeatureGroup::kContradiction, 1, c.numerics);
        put(FeatureGroup::kContradiction, 2, c.dates);
      }
      if (want(FeatureGroup::kLengths)) {
        put(FeatureGroup::kLengths, 0, static_cast<double>(tokens.size()));
        put(FeatureGroup::kLengths, 1, static_cast<double>(utf8_length(s.text)));
      }
      if (want(FeatureGroup::kSimToPrev)) {
        double sim;
        if (train_set.count(r)) {
          std::vector<std::span<const double>> others;
          others.reserve(positives.size());
          for (std::size_t p = 0; p < positives.size(); ++p)
            if (positive_ids[p] != r) others.push_back(positives[p]);
          sim = sim_to_checked(as_span(ann->embedding), others);
        } else {
          sim = sim_to_checked(as_span(ann->embedding), positives);
        }
        put(FeatureGroup::kSimToPrev, 0, sim);
      }
    }
  }
  return m;
}

FeatureMatrix assemble_matrix(const Corpus& corpus,
                              const FeatureResources& resources,
                              const GroupSet& groups,
                              const FittedExtractors& fitted,
                              std::span<const std::size_t> train_rows) {
  FeatureMatrix m = raw_features(corpus, resources, groups, fitted, train_rows);
  m.standardization = Standardizer::fit(m.values, train_rows);
  m.standardization.apply(m.values);
  return m;
}

std::vector<Eigen::Index> varying_columns(const Eigen::MatrixXd& values,
                                          std::span<const std::size_t> rows) {
  std::vector<Eigen::Index> out;
  if (rows.empty()) return out;
  const auto first = static_cast<Eigen::Index>(rows.front());
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (std::size_t r : rows) {
      if (values(static_cast<Eigen::Index>(r), c) != values(first, c)) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

}  // namespace cwrank
