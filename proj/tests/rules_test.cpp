#include "eif/rules.hpp"

#include <gtest/gtest.h>

namespace eif {
namespace {

TEST(Rules, MaxWordsCountsMaximalNonWhitespaceRuns) {
  EXPECT_EQ(check_rule(MaxWords{30}, "one two three four five six seven eight nine ten"), 1);
  EXPECT_EQ(check_rule(MaxWords{3}, "a  b\tc\nd"), 0);
  EXPECT_EQ(check_rule(MaxWords{0}, "   \n\t "), 1);
  EXPECT_EQ(check_rule(MinWords{2}, "only"), 0);
  EXPECT_EQ(check_rule(MinWords{1}, "only"), 1);
}

TEST(Rules, MustIncludeExclude) {
  EXPECT_EQ(check_rule(MustInclude{"simile"}, "a plain sentence"), 0);
  EXPECT_EQ(check_rule(MustInclude{"simile"}, "uses a simile here"), 1);
  EXPECT_EQ(check_rule(MustExclude{"secret"}, "nothing hidden"), 1);
  EXPECT_EQ(check_rule(MustExclude{"secret"}, "a secret leaks"), 0);
}

TEST(Rules, NumberedItemsCountsExactly) {
  EXPECT_EQ(check_rule(NumberedItems{3}, "1. a\n2. b\n3. c"), 1);
  EXPECT_EQ(check_rule(NumberedItems{3}, "1. a\n2. b"), 0);
  EXPECT_EQ(check_rule(NumberedItems{2}, "  1. indented\nplain\n12. double digits"), 1);
  EXPECT_EQ(check_rule(NumberedItems{0}, "no list at all"), 1);
  // a digit without the dot is not an item
  EXPECT_EQ(check_rule(NumberedItems{1}, "1 missing dot\n2. real"), 1);
}

TEST(Rules, AffixesAndLength) {
  EXPECT_EQ(check_rule(EndsWith{"."}, "done."), 1);
  EXPECT_EQ(check_rule(EndsWith{"."}, "done"), 0);
  EXPECT_EQ(check_rule(StartsWith{"alpha"}, "alpha ."), 1);
  EXPECT_EQ(check_rule(StartsWith{"alpha"}, "beta alpha"), 0);
  EXPECT_EQ(check_rule(CharLengthBetween{2, 5}, "abc"), 1);
  EXPECT_EQ(check_rule(CharLengthBetween{2, 5}, "a"), 0);
  EXPECT_EQ(check_rule(CharLengthBetween{2, 5}, "abcdef"), 0);
}

TEST(Rules, RegexSearchesAnywhere) {
  EXPECT_EQ(check_rule(RegexMatch{"[0-9]{4}"}, "year 2024 was"), 1);
  EXPECT_EQ(check_rule(RegexMatch{"^yes"}, "no, yes"), 0);
}

TEST(Rules, JsonRoundTrip) {
  const RuleSpec rules[] = {
      MaxWords{30},      MinWords{2},           MustInclude{"kw"},
      MustExclude{"x"},  RegexMatch{"a+b"},     NumberedItems{3},
      EndsWith{"."},     StartsWith{"Dear"},    CharLengthBetween{1, 40},
  };
  for (const RuleSpec& rule : rules) {
    const RuleSpec back = rule_from_json(rule_to_json(rule));
    EXPECT_EQ(rule_to_json(back), rule_to_json(rule));
  }
}

TEST(Rules, JsonRejectsBadParameters) {
  EXPECT_THROW(rule_from_json({{"kind", "max_words"}, {"limit", -1}}), SchemaError);
  EXPECT_THROW(rule_from_json({{"kind", "char_length_between"}, {"lo", 5}, {"hi", 2}}),
               SchemaError);
  EXPECT_THROW(rule_from_json({{"kind", "regex_match"}, {"pattern", "("}}), SchemaError);
  EXPECT_THROW(rule_from_json({{"kind", "speed_limit"}, {"limit", 3}}), SchemaError);
  EXPECT_THROW(rule_from_json({{"kind", "must_include"}}), SchemaError);
}

}  // namespace
}  // namespace eif
