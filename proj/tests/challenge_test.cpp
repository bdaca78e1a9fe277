#include <gtest/gtest.h>

#include <set>

#include "qakbp/challenge.hpp"
#include "qakbp/io.hpp"
#include "qakbp/ingest.hpp"
#include "test_util.hpp"

namespace qakbp {
namespace {

using testing::make_negative;
using testing::make_positive;

const TemplateSet kTemplates(std::vector<QuestionTemplate>{{"place_of_birth", "Where was XXX born?"}});

Instance uwre_pos(const std::string& id, const std::string& entity, const std::string& sentence,
                  const std::string& answer, const std::string& relation = "place_of_birth") {
  auto inst = make_positive(id, "Where was " + entity + " born?", sentence,
                            {{static_cast<std::int64_t>(unicode::length(
                                  std::string_view(sentence).substr(0, sentence.find(answer)))),
                              answer}},
                            Origin::uwre_positive);
  inst.relation = relation;
  inst.subject_entity = entity;
  return inst;
}

TEST(Challenge, SwapsEntitiesBetweenTwoPositives) {
  Dataset d;
  d.instances.push_back(uwre_pos("a", "Obama", "President Obama was born in Honolulu, Hawaii.", "Honolulu, Hawaii"));
  d.instances.push_back(uwre_pos("b", "Lincoln", "Lincoln was born in Kentucky.", "Kentucky"));
  const auto r = build_challenge_set(d, kTemplates, 1);
  ASSERT_EQ(r.dataset.instances.size(), 2u);
  const auto& c0 = r.dataset.instances[0];
  EXPECT_EQ(c0.id, "a-chal");
  EXPECT_EQ(c0.question, "Where was Lincoln born?");
  EXPECT_EQ(c0.context, "President Obama was born in Honolulu, Hawaii.");
  EXPECT_TRUE(c0.answers.empty());
  EXPECT_EQ(c0.origin, Origin::challenge_negative);
  EXPECT_EQ(c0.subject_entity, "Lincoln");
  EXPECT_EQ(r.dataset.instances[1].question, "Where was Obama born?");
  EXPECT_TRUE(validate_dataset(r.dataset).empty());
}

TEST(Challenge, SingleEntityRelationIsSkipped) {
  Dataset d;
  d.instances.push_back(uwre_pos("a", "Obama", "Obama was born in Hawaii.", "Hawaii"));
  const auto r = build_challenge_set(d, kTemplates, 1);
  EXPECT_TRUE(r.dataset.instances.empty());
  EXPECT_EQ(r.report.skipped_no_donor, 1u);
}

TEST(Challenge, DonorMentionedInSentenceIsIneligible) {
  Dataset d;
  d.instances.push_back(uwre_pos("a", "Obama", "Obama met LINCOLN fans in Hawaii.", "Hawaii"));
  d.instances.push_back(uwre_pos("b", "Lincoln", "Lincoln was born in Kentucky.", "Kentucky"));
  const auto r = build_challenge_set(d, kTemplates, 3);
  ASSERT_EQ(r.dataset.instances.size(), 1u);
  EXPECT_EQ(r.dataset.instances[0].id, "b-chal");
  EXPECT_EQ(r.report.skipped_no_donor, 1u);
}

// The seeded pick lies in the brute-force eligible set, and relations never mix.
TEST(Challenge, PicksAreEligible) {
  const auto uwre = ingest_uwre_file(std::string(QAKBP_TEST_DATA) + "/uwre_synth.tsv", Split::train);
  const auto tl = load_templates(std::string(QAKBP_TEST_DATA) + "/templates.tsv");
  const TemplateSet ts(tl.templates);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = build_challenge_set(uwre.dataset, ts, seed);
    EXPECT_EQ(r.report.emitted + r.report.skipped_no_donor, r.report.positives);
    std::set<std::string> input_ids;
    for (const auto& i : uwre.dataset.instances) input_ids.insert(i.id);
    for (const auto& c : r.dataset.instances) {
      const auto src_id = c.id.substr(0, c.id.size() - kChallengeSuffix.size());
      const Instance* src = nullptr;
      for (const auto& i : uwre.dataset.instances) {
        if (i.id == src_id) src = &i;
      }
      ASSERT_NE(src, nullptr);
      EXPECT_FALSE(input_ids.count(c.id));
      std::set<std::string> eligible;
      for (const auto& i : uwre.dataset.instances) {
        if (i.origin == Origin::uwre_positive && i.relation == src->relation &&
            !unicode::equals_ci(*i.subject_entity, *src->subject_entity) &&
            !unicode::contains_ci(src->context, *i.subject_entity)) {
          eligible.insert(*i.subject_entity);
        }
      }
      EXPECT_TRUE(eligible.count(*c.subject_entity)) << c.id;
      EXPECT_EQ(c.relation, src->relation);
      EXPECT_EQ(c.question, instantiate(ts.select(*src->relation), {*src->relation, *c.subject_entity}));
    }
  }
}

TEST(Challenge, SameSeedSameBytes) {
  const auto uwre = ingest_uwre_file(std::string(QAKBP_TEST_DATA) + "/uwre_synth.tsv", Split::train);
  const TemplateSet ts(load_templates(std::string(QAKBP_TEST_DATA) + "/templates.tsv").templates);
  const auto a = serialize(build_challenge_set(uwre.dataset, ts, 17).dataset);
  const auto b = serialize(build_challenge_set(uwre.dataset, ts, 17).dataset);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, serialize(build_challenge_set(uwre.dataset, ts, 18).dataset));
}

Dataset uwre_split(std::size_t negatives) {
  Dataset d;
  d.name = "split";
  d.instances.push_back(uwre_pos("p0", "Obama", "Obama was born in Hawaii.", "Hawaii"));
  for (std::size_t i = 0; i < negatives; ++i) {
    auto n = make_negative("n" + std::to_string(i), "q", "c", Origin::uwre_negative);
    d.instances.push_back(n);
  }
  return d;
}

Dataset pool_of(std::size_t n) {
  Dataset d;
  d.name = "pool";
  for (std::size_t i = 0; i < n; ++i) {
    d.instances.push_back(make_negative("c" + std::to_string(i), "q", "c", Origin::challenge_negative));
  }
  return d;
}

std::size_t count_origin(const Dataset& d, Origin o) {
  std::size_t n = 0;
  for (const auto& i : d.instances) n += i.origin == o;
  return n;
}

TEST(UwrePlus, HalfReplaced) {
  const auto r = build_uwre_plus(uwre_split(100), pool_of(500), 9);
  EXPECT_EQ(count_origin(r.dataset, Origin::uwre_negative), 50u);
  EXPECT_EQ(count_origin(r.dataset, Origin::challenge_negative), 50u);
  EXPECT_EQ(count_origin(r.dataset, Origin::uwre_positive), 1u);
  EXPECT_EQ(r.report.shortfall, 0u);
}

TEST(UwrePlus, ShortPool) {
  const auto r = build_uwre_plus(uwre_split(100), pool_of(30), 9);
  EXPECT_EQ(count_origin(r.dataset, Origin::uwre_negative), 50u);
  EXPECT_EQ(count_origin(r.dataset, Origin::challenge_negative), 30u);
  EXPECT_EQ(r.report.removed, 50u);
  EXPECT_EQ(r.report.inserted, 30u);
  EXPECT_EQ(r.report.shortfall, 20u);
}

TEST(UwrePlus, Errors) {
  EXPECT_THROW(build_uwre_plus(uwre_split(0), pool_of(5), 1), Error);
  EXPECT_THROW(build_uwre_plus(uwre_split(4), pool_of(0), 1), Error);
  auto bad = pool_of(2);
  bad.instances[0].origin = Origin::uwre_negative;
  EXPECT_THROW(build_uwre_plus(uwre_split(4), bad, 1), Error);
}

TEST(UwrePlus, DeterministicUnderSeed) {
  const auto a = build_uwre_plus(uwre_split(41), pool_of(60), 4);
  const auto b = build_uwre_plus(uwre_split(41), pool_of(60), 4);
  EXPECT_EQ(serialize(a.dataset), serialize(b.dataset));
}

}  // namespace
}  // namespace qakbp
