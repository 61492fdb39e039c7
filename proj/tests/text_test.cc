#include "cwrank/text.h"

#include <sstream>

#include <gtest/gtest.h>

#include "cwrank/error.h"

namespace cwrank {
namespace {

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("I did not."), (std::vector<std::string>{"i", "did", "not"}));
  EXPECT_EQ(tokenize("$5 trillion, 3.5 million"),
            (std::vector<std::string>{"5", "trillion", "3", "5", "million"}));
  EXPECT_EQ(tokenize("don't"), (std::vector<std::string>{"don", "t"}));
  EXPECT_TRUE(tokenize(" ...  ").empty());
}

TEST(Tokenize, NonAsciiBytesSeparate) {
  EXPECT_EQ(tokenize("caf\xc3\xa9 ok"), (std::vector<std::string>{"caf", "ok"}));
}

TEST(Utf8Length, CountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("caf\xc3\xa9"), 4u);
}

TEST(Lexicon, CountsSingleAndMultiWordEntries) {
  const Lexicon lex("bias", {"Disaster", "so-called", "disaster"});
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.count_matches(tokenize("A so-called plan, a disaster and a DISASTER.")),
            3u);
  EXPECT_EQ(lex.count_matches(tokenize("so then called")), 0u);
}

TEST(Lexicon, ReadSkipsCommentsAndBlanks) {
  std::istringstream in("# header\n\nalpha\n  beta gamma  \n# beta\n");
  const Lexicon lex = read_lexicon(in, "x");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.count_matches({"beta", "gamma", "alpha"}), 2u);
}

TEST(Lexicon, EmptyFileIsError) {
  std::istringstream in("# nothing\n");
  EXPECT_THROW(read_lexicon(in, "x"), ValidationError);
  EXPECT_THROW(load_lexicon("/nonexistent/lex.txt", "x"), ConfigError);
}

}  // namespace
}  // namespace cwrank
