#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qakbp/metrics.hpp"
#include "test_util.hpp"

namespace qakbp {
namespace {

using testing::make_negative;
using testing::make_positive;

TEST(Normalize, Rules) {
  EXPECT_EQ(normalize_answer("Honolulu, Hawaii"), "honolulu hawaii");
  EXPECT_EQ(normalize_answer("The  U.S."), "us");
  EXPECT_EQ(normalize_answer(""), "");
  EXPECT_EQ(normalize_answer("  An apple\ta day "), "apple day");
  EXPECT_EQ(normalize_answer("Theatre"), "theatre");
  EXPECT_EQ(normalize_answer("ZÜRICH!"), "zürich");
}

Dataset four_instances() {
  Dataset d;
  d.instances.push_back(make_positive("p1", "q", "Honolulu, Hawaii", {{0, "Honolulu, Hawaii"}}));
  d.instances.push_back(make_positive("p2", "q", "Kenya", {{0, "Kenya"}}));
  d.instances.push_back(make_negative("n1", "q", "x"));
  d.instances.push_back(make_negative("n2", "q", "y"));
  return d;
}

TEST(SlotFilling, HandEnumeratedExample) {
  const std::vector<Prediction> preds = {
      {"p1", "Honolulu, Hawaii"}, {"p2", "Nairobi"}, {"n1", std::nullopt}, {"n2", "Paris"}};
  const auto r = score_slot_filling(four_instances(), preds);
  // Walk the four cases: TP, FP on a positive, ignored TN, FP on a negative.
  const double p = 1.0 / 3.0, rc = 1.0 / 2.0;
  EXPECT_EQ(r.counts.answered, 3u);
  EXPECT_EQ(r.counts.correct, 1u);
  EXPECT_DOUBLE_EQ(*r.precision, p);
  EXPECT_DOUBLE_EQ(*r.recall, rc);
  EXPECT_NEAR(*r.f1, 0.4, 1e-12);
  EXPECT_FALSE(r.accuracy);
}

TEST(SlotFilling, Conventions) {
  const auto d = four_instances();
  auto r = score_slot_filling(d, {});
  EXPECT_EQ(*r.precision, 0.0);
  EXPECT_EQ(*r.recall, 0.0);
  EXPECT_EQ(*r.f1, 0.0);
  EXPECT_EQ(r.counts.missing_predictions, 4u);

  r = score_slot_filling(d, {{"p1", "honolulu hawaii"}, {"p2", "the Kenya"}});
  EXPECT_EQ(*r.precision, 1.0);
  EXPECT_EQ(*r.recall, 1.0);
  EXPECT_EQ(*r.f1, 1.0);

  ScoreOptions one;
  one.zero_policy = ZeroPolicy::one;
  r = score_slot_filling(d, {}, one);
  EXPECT_EQ(*r.precision, 1.0);
  EXPECT_EQ(*r.recall, 0.0);
}

TEST(SlotFilling, RejectsBadPredictionFiles) {
  const auto d = four_instances();
  EXPECT_THROW(score_slot_filling(d, {{"p1", "x"}, {"p1", "y"}}), ScoreError);
  try {
    score_slot_filling(d, {{"ghost", "x"}, {"p1", "y"}});
    FAIL();
  } catch (const ScoreError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(SlotFilling, DummyTokenMapsToNoAnswer) {
  Dataset d;
  d.no_answer_token = "NoAnswerFound";
  d.instances.push_back(make_positive("p", "q", "NoAnswerFound Kenya", {{14, "Kenya"}}));
  d.instances.push_back(make_positive("n", "q", "NoAnswerFound x", {{0, "NoAnswerFound"}},
                                      Origin::squad_negative));
  const auto r = score_slot_filling(d, {{"p", "Kenya"}, {"n", "NoAnswerFound"}});
  EXPECT_EQ(r.counts.positives, 1u);
  EXPECT_EQ(r.counts.negatives, 1u);
  EXPECT_EQ(r.counts.answered, 1u);
  EXPECT_EQ(*r.f1, 1.0);
  // Predicting the token on a positive is a miss, not an error.
  const auto miss = score_slot_filling(d, {{"p", "noanswerfound"}});
  EXPECT_EQ(miss.counts.answered, 0u);
  EXPECT_EQ(*miss.recall, 0.0);
}

TEST(SlotFilling, TokenF1GivesPartialCredit) {
  Dataset d;
  d.instances.push_back(make_positive("p", "q", "Honolulu, Hawaii", {{0, "Honolulu, Hawaii"}}));
  ScoreOptions opts;
  opts.match = MatchMode::token_f1;
  const auto r = score_slot_filling(d, {{"p", "Honolulu"}}, opts);
  EXPECT_NEAR(*r.precision, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.counts.correct, 0u);
  EXPECT_EQ(*score_slot_filling(d, {{"p", "Honolulu"}}).precision, 0.0);
  EXPECT_NEAR(token_f1("x b c", "b c d"), 2.0 / 3.0, 1e-12);
}

TEST(SlotFilling, PerRelationBreakdown) {
  auto d = four_instances();
  d.instances[0].relation = "r1";
  d.instances[1].relation = "r2";
  const auto r = score_slot_filling(d, {{"p1", "Honolulu, Hawaii"}, {"p2", "Nairobi"}});
  ASSERT_EQ(r.per_relation.size(), 2u);
  EXPECT_EQ(r.per_relation.at("r1").f1, 1.0);
  EXPECT_EQ(r.per_relation.at("r2").f1, 0.0);
}

// Small random instances against the tally oracle, then under shuffles.
TEST(SlotFilling, OracleAndPermutation) {
  std::mt19937_64 gen(3);
  const std::vector<std::string> vocab = {"Paris", "paris.", "The Paris", "Rome", "an Oslo", "Oslo"};
  for (int trial = 0; trial < 200; ++trial) {
    Dataset d;
    std::vector<Prediction> preds;
    std::vector<oracle::Case> cases;
    const auto n = gen() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = "i" + std::to_string(i);
      oracle::Case c;
      if (gen() % 2) {
        const auto g = vocab[gen() % vocab.size()];
        d.instances.push_back(make_positive(id, "q", g, {{0, g}}));
        c.golds = {g};
      } else {
        d.instances.push_back(make_negative(id, "q", "ctx"));
      }
      if (gen() % 3) {
        c.answer = vocab[gen() % vocab.size()];
        preds.push_back({id, c.answer});
      }
      cases.push_back(c);
    }
    const auto want = oracle::tally(cases);
    auto r = score_slot_filling(d, preds);
    ASSERT_NEAR(*r.precision, want.precision(), 1e-12);
    ASSERT_NEAR(*r.recall, want.recall(), 1e-12);
    ASSERT_NEAR(*r.f1, want.f1(), 1e-12);
    std::shuffle(d.instances.begin(), d.instances.end(), gen);
    std::shuffle(preds.begin(), preds.end(), gen);
    const auto s = score_slot_filling(d, preds);
    ASSERT_EQ(*s.precision, *r.precision);
    ASSERT_EQ(*s.recall, *r.recall);
  }
}

TEST(Challenge, AccuracyIsNoAnswerFraction) {
  Dataset d;
  std::vector<Prediction> preds;
  for (int i = 0; i < 100; ++i) {
    const auto id = "c" + std::to_string(i);
    d.instances.push_back(make_negative(id, "q", "ctx", Origin::challenge_negative));
    preds.push_back({id, i < 83 ? std::nullopt : std::optional<std::string>("Honolulu")});
  }
  const auto r = score_challenge_accuracy(d, preds);
  EXPECT_EQ(*r.accuracy, 0.83);
  EXPECT_FALSE(r.precision);
  EXPECT_EQ(r.counts.no_answer_predictions, 83u);
}

TEST(Challenge, ExtremesAndMixedInput) {
  Dataset d;
  d.instances.push_back(make_negative("a", "q", "ctx", Origin::challenge_negative));
  d.instances.push_back(make_negative("b", "q", "ctx", Origin::challenge_negative));
  EXPECT_EQ(*score_challenge_accuracy(d, {{"a", "x"}, {"b", "y"}}).accuracy, 0.0);
  EXPECT_EQ(*score_challenge_accuracy(d, {}).accuracy, 1.0);
  d.instances.push_back(make_positive("p", "q", "ctx", {{0, "ctx"}}));
  EXPECT_THROW(score_challenge_accuracy(d, {}), ScoreError);
}

TEST(Report, JsonAndTsv) {
  const auto r = score_slot_filling(four_instances(), {{"p1", "Honolulu, Hawaii"}});
  const auto j = to_json(r);
  EXPECT_EQ(j["precision"], 1.0);
  EXPECT_TRUE(j["accuracy"].is_null());
  const auto line = to_tsv(r);
  EXPECT_EQ(line.substr(0, 28), "1.000000\t0.500000\t0.666667\t-");
  const auto header = tsv_header();
  EXPECT_EQ(std::count(header.begin(), header.end(), '\t'),
            std::count(line.begin(), line.end(), '\t'));
}

}  // namespace
}  // namespace qakbp
