#include "cwrank/text.h"

#include <algorithm>
#include <fstream>
#include <istream>

#include "cwrank/error.h"

namespace cwrank {
namespace {

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](unsigned char c) {
        return (c & 0xC0) != 0x80;
      }));
}

Lexicon::Lexicon(std::string name, const std::vector<std::string>& entries)
    : name_(std::move(name)) {
  for (const std::string& e : entries) {
    auto toks = tokenize(e);
    if (!toks.empty()) entries_.push_back(std::move(toks));
  }
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
  for (const auto& e : entries_) {
    first_tokens_.insert(e.front());
  }
}

std::size_t Lexicon::count_matches(const std::vector<std::string>& tokens) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!first_tokens_.count(tokens[i])) continue;
    // Entries sharing this first token are contiguous in sorted order.
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), tokens[i],
        [](const std::vector<std::string>& e, const std::string& t) {
          return e.front() < t;
        });
    for (; it != entries_.end() && it->front() == tokens[i]; ++it) {
      if (i + it->size() > tokens.size()) continue;
      if (std::equal(it->begin(), it->end(), tokens.begin() + i)) ++count;
    }
  }
  return count;
}

Lexicon read_lexicon(std::istream& in, std::string name) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    entries.push_back(line);
  }
  Lexicon lex(name, entries);
  if (lex.empty()) throw ValidationError("lexicon " + name + " has no entries");
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file " + path.string());
  try {
    return read_lexicon(in, std::move(name));
  } catch (const ValidationError&) {
    throw ValidationError("lexicon " + path.string() + " has no entries");
  }
}

}  // namespace cwrank
