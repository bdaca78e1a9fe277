#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qakbp/random.hpp"
#include "qakbp/unicode.hpp"

namespace qakbp {
namespace {

TEST(Unicode, DecodesMultibyte) {
  const std::string s = "Zürich 東京 \xF0\x9F\x98\x80";
  const auto cps = unicode::decode(s);
  EXPECT_EQ(cps.size(), 11u);
  EXPECT_EQ(cps[1], U'ü');
  EXPECT_EQ(cps[8], U'京');
  EXPECT_EQ(cps[10], char32_t{0x1F600});
  EXPECT_EQ(unicode::length(s), 11u);
}

TEST(Unicode, RejectsMalformed) {
  EXPECT_THROW(unicode::decode("\xC3"), Utf8Error);          // truncated
  EXPECT_THROW(unicode::decode("\xC0\xAF"), Utf8Error);      // overlong
  EXPECT_THROW(unicode::decode("\xED\xA0\x80"), Utf8Error);  // surrogate
  EXPECT_THROW(unicode::decode("\xFF"), Utf8Error);
  EXPECT_FALSE(unicode::is_valid("a\x80"));
  EXPECT_TRUE(unicode::is_valid("plain"));
}

TEST(Unicode, RoundTripProperty) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::uint32_t> plane(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string s;
    const auto n = gen() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      char32_t cp;
      switch (plane(gen)) {
        case 0: cp = 0x20 + gen() % 0x5F; break;
        case 1: cp = 0x80 + gen() % 0x780; break;
        case 2: cp = 0xE000 + gen() % 0x1FFF; break;
        default: cp = 0x10000 + gen() % 0xFFFFF; break;
      }
      s.push_back(cp);
    }
    const auto utf8 = unicode::encode(s);
    ASSERT_EQ(unicode::decode(utf8), s);
    ASSERT_EQ(unicode::length(utf8), s.size());
  }
}

TEST(Unicode, CaseFolding) {
  EXPECT_EQ(unicode::to_lower(std::string_view("ÉCOLE Ωmega ПРИВЕТ")), "école ωmega привет");
  EXPECT_TRUE(unicode::contains_ci("President OBAMA was born", "obama"));
  EXPECT_FALSE(unicode::contains_ci("President Obama", "lincoln"));
  EXPECT_TRUE(unicode::equals_ci("Zürich", "ZÜRICH"));
  EXPECT_TRUE(unicode::is_upper(U'Ä'));
  EXPECT_FALSE(unicode::is_upper(U'×'));
}

TEST(Unicode, SpaceAndPunct) {
  EXPECT_TRUE(unicode::is_space(0xA0));
  EXPECT_TRUE(unicode::is_space(U'\t'));
  EXPECT_FALSE(unicode::is_space(U'x'));
  EXPECT_TRUE(unicode::is_punct(U','));
  EXPECT_TRUE(unicode::is_punct(0x2014));
  EXPECT_FALSE(unicode::is_punct(U'a'));
  EXPECT_FALSE(unicode::is_punct(U'7'));
}

TEST(Random, RngBelowIsInRangeAndSeeded) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, b.below(7));
  }
}

TEST(Random, SampleIndicesAreSortedDistinctAndNested) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto small = sample_indices(200, 10, seed);
    const auto large = sample_indices(200, 50, seed);
    ASSERT_EQ(small.size(), 10u);
    ASSERT_EQ(large.size(), 50u);
    ASSERT_TRUE(std::is_sorted(small.begin(), small.end()));
    ASSERT_TRUE(std::adjacent_find(large.begin(), large.end()) == large.end());
    ASSERT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
  EXPECT_EQ(sample_indices(3, 5, 1), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(sample_indices(3, 0, 1).empty());
}

TEST(Random, DeriveSeedSeparatesLabels) {
  EXPECT_NE(derive_seed(1, "train"), derive_seed(1, "dev"));
  EXPECT_EQ(derive_seed(1, "train"), derive_seed(1, "train"));
  // FNV-1a reference values.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace qakbp
