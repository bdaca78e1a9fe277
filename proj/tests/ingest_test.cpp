#include <gtest/gtest.h>

#include <sstream>

#include "qakbp/ingest.hpp"
#include "test_util.hpp"

namespace qakbp {
namespace {

Json squad_doc(const std::string& context, const Json& answers) {
  return Json{{"version", "1.1"},
              {"data",
               {{{"title", "T"},
                 {"paragraphs",
                  {{{"context", context},
                    {"qas", {{{"id", "q1"}, {"question", "Where was Obama born?"},
                              {"answers", answers}}}}}}}}}}};
}

TEST(IngestSquad, Positive) {
  const auto r = ingest_squad(squad_doc("President Obama was born in Honolulu, Hawaii.",
                                        {{{"answer_start", 28}, {"text", "Honolulu, Hawaii"}}}),
                              Split::train);
  ASSERT_EQ(r.dataset.instances.size(), 1u);
  const auto& inst = r.dataset.instances[0];
  EXPECT_EQ(inst.answers, (std::vector<Span>{{28, "Honolulu, Hawaii"}}));
  EXPECT_EQ(inst.origin, Origin::squad_positive);
  EXPECT_EQ(inst.split, Split::train);
  EXPECT_FALSE(inst.relation);
  EXPECT_TRUE(validate_dataset(r.dataset).empty());
}

TEST(IngestSquad, DeduplicatesAnswersAndDropsMismatches) {
  auto r = ingest_squad(squad_doc("Obama was born in Hawaii.",
                                  {{{"answer_start", 18}, {"text", "Hawaii"}},
                                   {{"answer_start", 18}, {"text", "Hawaii"}}}),
                        Split::dev);
  ASSERT_EQ(r.dataset.instances.size(), 1u);
  EXPECT_EQ(r.dataset.instances[0].answers.size(), 1u);
  EXPECT_EQ(r.report.duplicate_answers_removed, 1u);

  r = ingest_squad(squad_doc("Obama was born in Hawaii.",
                             {{{"answer_start", 17}, {"text", "Hawaii"}}}),
                   Split::dev);
  EXPECT_TRUE(r.dataset.instances.empty());
  ASSERT_EQ(r.report.violations.size(), 1u);
  EXPECT_EQ(r.report.violations[0].rule, "span_mismatch");
}

TEST(IngestSquad, OffsetsAreCodePoints) {
  const std::string ctx = "Né à Zürich, Köln gagné.";
  const auto r = ingest_squad(squad_doc(ctx, {{{"answer_start", 13}, {"text", "Köln"}}}), Split::dev);
  ASSERT_EQ(r.dataset.instances.size(), 1u);
}

TEST(IngestSquad, SchemaErrorsCarryJsonPath) {
  Json doc = squad_doc("c", {{{"answer_start", "0"}, {"text", "c"}}});
  try {
    ingest_squad(doc, Split::dev);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("/data/0/paragraphs/0/qas/0/answers/0"),
              std::string::npos);
  }
  EXPECT_THROW(ingest_squad(Json{{"data", 3}}, Split::dev), ParseError);
}

TEST(IngestSquad, BundledCorpus) {
  const auto r = ingest_squad_file(std::string(QAKBP_TEST_DATA) + "/squad_synth.json", Split::train);
  EXPECT_EQ(r.dataset.instances.size(), 50u);
  EXPECT_TRUE(r.report.violations.empty());
  EXPECT_TRUE(validate_dataset(r.dataset).empty());
}

TEST(IngestUwre, PositiveFromFigureExample) {
  std::istringstream in(
      "place_of_birth\tWhere was XXX born?\tObama\tPresident Obama was born in Honolulu, "
      "Hawaii.\tHonolulu, Hawaii\n");
  const auto r = ingest_uwre(in, Split::test);
  ASSERT_EQ(r.dataset.instances.size(), 1u);
  const auto& inst = r.dataset.instances[0];
  EXPECT_EQ(inst.question, "Where was Obama born?");
  EXPECT_EQ(inst.answers, (std::vector<Span>{{28, "Honolulu, Hawaii"}}));
  EXPECT_EQ(inst.origin, Origin::uwre_positive);
  EXPECT_EQ(inst.relation, "place_of_birth");
  EXPECT_EQ(inst.subject_entity, "Obama");
  EXPECT_EQ(inst.id, "uwre-test-1");
  EXPECT_EQ(r.templates, (std::vector<QuestionTemplate>{{"place_of_birth", "Where was XXX born?"}}));
}

TEST(IngestUwre, NegativeAndDrops) {
  std::istringstream in(
      "place_of_birth\tWhere was XXX born?\tObama\tHis father was born in Kenya.\t\n"
      "place_of_birth\tWhere was XXX born?\tObama\tHe lived in Chicago.\tBoston\n"
      "place_of_birth\tWhere was he born?\tObama\tHe lived in Chicago.\tChicago\n"
      "\tWhere was XXX born?\tObama\tHe lived in Chicago.\tChicago\n"
      "r\tXXX?\te\tParis or Paris\tParis|Paris\n");
  const auto r = ingest_uwre(in, Split::train);
  ASSERT_EQ(r.dataset.instances.size(), 2u);
  EXPECT_EQ(r.dataset.instances[0].origin, Origin::uwre_negative);
  EXPECT_TRUE(r.dataset.instances[0].answers.empty());
  ASSERT_EQ(r.report.violations.size(), 3u);
  EXPECT_EQ(r.report.violations[0].rule, "answer_not_found");
  EXPECT_EQ(r.report.violations[1].rule, "bad_template");
  EXPECT_EQ(r.report.violations[2].rule, "empty_query_field");
  EXPECT_EQ(r.report.ambiguous_locations, 2u);
  EXPECT_EQ(r.report.duplicate_answers_removed, 1u);
  EXPECT_EQ(r.dataset.instances[1].answers, (std::vector<Span>{{0, "Paris"}}));
}

TEST(IngestUwre, MalformedRowNamesLine) {
  std::istringstream in("r\tXXX?\te\ts\ta\n\nonly\tthree\tfields\n");
  try {
    ingest_uwre(in, Split::train, "rows.tsv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("rows.tsv:3"), std::string::npos);
  }
}

TEST(IngestUwre, BundledCorpus) {
  const auto r = ingest_uwre_file(std::string(QAKBP_TEST_DATA) + "/uwre_synth.tsv", Split::train);
  EXPECT_EQ(r.dataset.instances.size(), 45u);
  EXPECT_TRUE(r.report.violations.empty());
  EXPECT_EQ(r.templates.size(), 2u);
  EXPECT_TRUE(validate_dataset(r.dataset).empty());
}

}  // namespace
}  // namespace qakbp
