#ifndef CWRANK_TEXT_H_
#define CWRANK_TEXT_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cwrank {

// Canonical tokenizer: ASCII-lowercase, split on every run of characters
// that are not ASCII letters or digits, drop empty tokens. Bytes >= 0x80
// act as separators.
std::vector<std::string> tokenize(std::string_view text);

// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

// A named word/phrase list. Phrases are stored as token sequences so they
// match under the canonical tokenizer.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, const std::vector<std::string>& entries);

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Occurrences of any entry in the token sequence. Each entry is counted
  // at every start position where it matches.
  std::size_t count_matches(const std::vector<std::string>& tokens) const;

 private:
  std::string name_;
  std::vector<std::vector<std::string>> entries_;  // deduplicated, sorted
  std::unordered_set<std::string> first_tokens_;
};

// One entry per line, '#' starts a comment, blank lines skipped.
Lexicon load_lexicon(const std::filesystem::path& path, std::string name);
Lexicon read_lexicon(std::istream& in, std::string name);

}  // namespace cwrank

#endif  // CWRANK_TEXT_H_
