#ifndef CWRANK_FEATURES_H_
#define CWRANK_FEATURES_H_

#include <array>
#include <bitset>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cwrank/annotations.h"
#include "cwrank/corpus.h"
#include "cwrank/text.h"
#include "cwrank/vocabulary.h"

namespace cwrank {

// Canonical column order of the assembled matrix follows this enum.
enum class FeatureGroup : std::size_t {
  kEmbeddings,
  kMetadata,
  kSentiment,
  kTopics,
  kDiscourse,
  kNER,
  kSegmentSize,
  kPosition,
  kLinguistic,
  kContradiction,
  kLengths,
  kSimToPrev,
};

inline constexpr std::size_t kNumFeatureGroups = 12;

using GroupSet = std::bitset<kNumFeatureGroups>;

inline GroupSet all_groups() { return GroupSet().set(); }
inline std::size_t group_bit(FeatureGroup g) { return static_cast<std::size_t>(g); }

std::string_view group_name(FeatureGroup g);
// Case-insensitive; ignores spaces, dots, dashes and underscores, so
// "Sim. to prev.", "sim_to_prev" and "SimToPrev" are all accepted.
std::optional<FeatureGroup> parse_group(std::string_view name);

// Speaker-role assignment for the Metadata group. Names compare
// case-insensitively against the transcript speaker field.
struct SpeakerRoles {
  std::vector<std::string> candidates;
  std::vector<std::string> moderators;
  // Extra tokens that refer to a candidate: {token, candidate}.
  std::vector<std::pair<std::string, std::string>> aliases;

  enum Role { kCandidate = 0, kModerator = 1, kOther = 2 };
  Role role(std::string_view speaker) const;
};

SpeakerRoles default_speaker_roles();

struct LexiconSet {
  std::vector<Lexicon> linguistic;  // bias, assertive, subjective
  std::vector<Lexicon> sentiment;   // positive, negative

  bool loaded() const { return !linguistic.empty() && !sentiment.empty(); }
};

// Loads bias.txt, assertive.txt, subjective.txt, positive.txt and
// negative.txt from `dir`.
LexiconSet load_lexicon_dir(const std::filesystem::path& dir);

struct StructuralFeatures {
  double debate_position = 0.0;        // index / (n - 1)
  double intervention_length = 0.0;    // maximal same-speaker run
  double intervention_position = 0.0;  // offset / (run length - 1)
  std::array<double, 3> role{};        // one-hot SpeakerRoles::Role
  double opponent_mention = 0.0;
};

StructuralFeatures structural_features(const Debate& debate,
                                       std::size_t position,
                                       const SpeakerRoles& roles);

// Per lexicon: (match count, match count / token count).
std::vector<double> lexicon_features(const std::vector<std::string>& tokens,
                                     std::span<const Lexicon> lexicons);

struct ContradictionCounts {
  double negations = 0.0;
  double numerics = 0.0;
  double dates = 0.0;
};

ContradictionCounts contradiction_features(const std::vector<std::string>& tokens);

// Maximum cosine similarity of `query` to any of `positives`; 0 when the
// set is empty. Pairs involving a zero-norm vector contribute 0.
double sim_to_checked(std::span<const double> query,
                      const std::vector<std::span<const double>>& positives);

struct FeatureResources {
  const AnnotationStore* annotations = nullptr;
  LexiconSet lexicons;
  SpeakerRoles roles = default_speaker_roles();
  VocabConfig vocab;
};

// Everything fitted on the training rows of one fold.
struct FittedExtractors {
  Vocabulary vocab;
  std::vector<std::size_t> positive_rows;  // ANY-positive training rows
};

FittedExtractors fit_extractors(const Corpus& corpus,
                                const FeatureResources& resources,
                                std::span<const std::size_t> train_rows);

struct ColumnSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t width() const { return end - begin; }
};

// Per-column z-score fitted on training rows. Columns with zero variance
// are only mean-centred.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& values,
                          std::span<const std::size_t> rows);
  void apply(Eigen::MatrixXd& values) const;
};

struct FeatureMatrix {
  Eigen::MatrixXd values;  // one row per corpus sentence, corpus order
  std::array<std::optional<ColumnSpan>, kNumFeatureGroups> spans;
  std::vector<std::string> column_names;
  Standardizer standardization;  // empty for raw matrices

  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

// Width of a group under the given resources; throws ConfigError when the
// group's data dependency is missing.
std::size_t group_width(FeatureGroup g, const FeatureResources& resources,
                        const FittedExtractors& fitted);

// Unstandardized features for every corpus row. For training rows the
// similarity feature excludes the row itself from the positive set.
FeatureMatrix raw_features(const Corpus& corpus, const FeatureResources& resources,
                           const GroupSet& groups, const FittedExtractors& fitted,
                           std::span<const std::size_t> train_rows);

// Columns that are not constant over `rows`. Constant training columns get
// no gradient, so the trainer leaves them out.
std::vector<Eigen::Index> varying_columns(const Eigen::MatrixXd& values,
                                          std::span<const std::size_t> rows);

// raw_features followed by standardization fitted on `train_rows`.
FeatureMatrix assemble_matrix(const Corpus& corpus,
                              const FeatureResources& resources,
                              const GroupSet& groups,
                              const FittedExtractors& fitted,
                              std::span<const std::size_t> train_rows);

}  // namespace cwrank

#endif  // CWRANK_FEATURES_H_
