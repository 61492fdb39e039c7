#include "cwrank/annotations.h"

#include <sstream>

#include <gtest/gtest.h>

#include "cwrank/error.h"
#include "test_util.h"

namespace cwrank {
namespace {

using testing::sentence;

Corpus two_sentences() {
  return Corpus({{"d1", {sentence("d1", 0, "A", "one"), sentence("d1", 1, "B", "two")}}});
}

std::string rec(int index, const std::string& topics = "[0.5,0.5]",
                const std::string& extra = "", const std::string& debate = "d1") {
  return R"({"debate_id":")" + debate + R"(","index":)" + std::to_string(index) +
         R"(,"pos_counts":{"NOUN":2,".":1},"ner":{"PER":1,"ORG":0,"LOC":0,"MISC":0,"count":1},)"
         R"("sentiment":-0.25,"topics":)" + topics +
         R"(,"embedding":[1,0,2],"discourse_prev":"none","discourse_next":"Contrast")" +
         extra + "}\n";
}

AnnotationStore read(const std::string& text) {
  std::istringstream in(text);
  return read_annotations(in, two_sentences(), "side.jsonl");
}

std::string validation_error(const std::string& text) {
  try {
    read(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "<no error>";
}

TEST(Annotations, MatchingStoreLoads) {
  const AnnotationStore s = read("# header: K=2 D=3\n" + rec(1) + rec(0));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.topic_count(), 2u);
  EXPECT_EQ(s.embedding_dim(), 3u);
  const Annotation& a = s.row(0);
  EXPECT_EQ(a.pos_counts[5], 2.0);  // NOUN
  EXPECT_EQ(a.pos_counts[10], 1.0);  // "."
  EXPECT_EQ(a.ner_flags[0], 1);
  EXPECT_EQ(a.ner_count, 1.0);
  EXPECT_EQ(a.sentiment, -0.25);
  EXPECT_EQ(kDiscourseRelations[a.discourse_next], "Contrast");
}

TEST(Annotations, MissingRecordNamesSentence) {
  const std::string msg = validation_error(rec(0));
  EXPECT_NE(msg.find("(d1, 1)"), std::string::npos) << msg;
}

TEST(Annotations, TopicsMustSumToOne) {
  const std::string msg = validation_error(rec(0, "[0.5,0.4,0.2]") + rec(1, "[0.5,0.4,0.2]"));
  EXPECT_NE(msg.find("sums to 1.1"), std::string::npos) << msg;
}

TEST(Annotations, RejectsInconsistentTopicLength) {
  EXPECT_NE(validation_error(rec(0) + rec(1, "[0.2,0.3,0.5]")).find("topic vector length"),
            std::string::npos);
}

TEST(Annotations, RejectsUnknownSentenceAndDuplicates) {
  EXPECT_NE(validation_error(rec(0) + rec(1) + rec(0, "[0.5,0.5]", "", "d9"))
                .find("no such sentence"),
            std::string::npos);
  EXPECT_NE(validation_error(rec(0) + rec(0)).find("duplicate"), std::string::npos);
}

TEST(Annotations, RejectsOutOfRangeValues) {
  EXPECT_NE(validation_error(rec(0, "[1.5,-0.5]") + rec(1)).find("negative topic"),
            std::string::npos);
  std::string bad = rec(0);
  bad.replace(bad.find("-0.25"), 5, "1.50");
  EXPECT_NE(validation_error(bad + rec(1)).find("sentiment"), std::string::npos);
  std::string tag = rec(0);
  tag.replace(tag.find("NOUN"), 4, "NN");
  EXPECT_NE(validation_error(tag + rec(1)).find("unknown POS tag"), std::string::npos);
  std::string rel = rec(0);
  rel.replace(rel.find("Contrast"), 8, "Sarcasm!");
  EXPECT_NE(validation_error(rel + rec(1)).find("discourse relation"), std::string::npos);
}

TEST(Annotations, MalformedLineIsParseError) {
  EXPECT_THROW(read(rec(0) + "{oops\n"), ParseError);
}

TEST(Annotations, RecordJsonRoundTrips) {
  const Corpus c = two_sentences();
  const AnnotationStore s = read(rec(0) + rec(1));
  const std::string text = annotation_record_json(c.row(0), s.row(0)) + "\n" +
                           annotation_record_json(c.row(1), s.row(1)) + "\n";
  const AnnotationStore back = read(text);
  EXPECT_EQ(back.row(1).embedding, s.row(1).embedding);
  EXPECT_EQ(back.row(1).pos_counts, s.row(1).pos_counts);
  EXPECT_EQ(back.row(1).discourse_next, s.row(1).discourse_next);
}

TEST(Annotations, DiscourseIndex) {
  EXPECT_EQ(discourse_index("none"), 0u);
  EXPECT_EQ(discourse_index("Elaboration"), 7u);
  EXPECT_EQ(discourse_index("bogus"), std::string::npos);
}

}  // namespace
}  // namespace cwrank
