#include "eif/segment.hpp"

#include <gtest/gtest.h>

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace eif {
namespace {

const char* kOneBlock =
    "start_sub_instruction_0 start_think T end_think start_answer A end_answer "
    "end_sub_instruction_0";

TEST(ParseResponse, SingleBlock) {
  SegmentedResponse r = parse_response(kOneBlock);
  ASSERT_EQ(r.segments.size(), 1u);
  EXPECT_EQ(r.segments[0].instruction_index, 0);
  EXPECT_EQ(r.segments[0].think, "T");
  EXPECT_EQ(r.segments[0].answer, "A");
}

TEST(ParseResponse, MultiTokenBodiesKeepInteriorSpacing) {
  SegmentedResponse r = parse_response(
      "start_sub_instruction_0\nstart_think\n a  deep   thought \nend_think\n"
      "start_answer\nthe answer\nend_answer\nend_sub_instruction_0\n");
  EXPECT_EQ(r.segments[0].think, "a  deep   thought");
  EXPECT_EQ(r.segments[0].answer, "the answer");
}

TEST(ParseResponse, MissingEndThink) {
  try {
    parse_response(
        "start_sub_instruction_0 start_think T start_answer A end_answer "
        "end_sub_instruction_0");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::missing_marker);
  }
}

TEST(ParseResponse, OutOfOrderIndices) {
  const std::string block1 =
      "start_sub_instruction_1 start_think t end_think start_answer a end_answer "
      "end_sub_instruction_1";
  try {
    parse_response(block1);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::nonconsecutive_index);
    EXPECT_EQ(e.position(), 0u);
  }
}

TEST(ParseResponse, DuplicateIndex) {
  const std::string twice = std::string(kOneBlock) + " " + kOneBlock;
  try {
    parse_response(twice);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::duplicate_index);
  }
}

TEST(ParseResponse, NestedBlock) {
  try {
    parse_response(
        "start_sub_instruction_0 start_think start_sub_instruction_1 end_think");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::nested_block);
  }
}

TEST(ParseResponse, AnswerBeforeThinkIsBadOrder) {
  try {
    parse_response(
        "start_sub_instruction_0 start_answer A end_answer start_think T end_think "
        "end_sub_instruction_0");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::bad_order);
  }
}

TEST(ParseResponse, EmptyAndWhitespaceOnlyFail) {
  EXPECT_THROW(parse_response(""), FormatError);
  EXPECT_THROW(parse_response("  \n\t "), FormatError);
}

TEST(ParseResponse, StrayTextOutsideBlocksFails) {
  EXPECT_THROW(parse_response(std::string("preamble ") + kOneBlock), FormatError);
  EXPECT_THROW(parse_response(std::string(kOneBlock) + " trailing"), FormatError);
}

TEST(ParseResponse, TruncatedBlockFails) {
  EXPECT_THROW(parse_response("start_sub_instruction_0 start_think T end_think"), FormatError);
}

TEST(ParseResponse, LeadingZeroIndexIsNotAMarker) {
  // start_sub_instruction_01 is a plain token, so the text has no block opener
  try {
    parse_response(
        "start_sub_instruction_01 start_think T end_think start_answer A end_answer "
        "end_sub_instruction_01");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::missing_marker);
    EXPECT_EQ(e.position(), 0u);
  }
}

TEST(FormatReward, AgreesWithParse) {
  EXPECT_EQ(format_reward(kOneBlock), 1);
  EXPECT_EQ(format_reward(""), 0);
  EXPECT_EQ(format_reward("start_sub_instruction_0 start_answer A end_answer "
                          "start_think T end_think end_sub_instruction_0"),
            0);
  const std::string two_blocks = render_response(std::vector<Segment>{
      {0, "first thought", "first answer"}, {1, "second thought", "second answer"}});
  EXPECT_EQ(format_reward(two_blocks), 1);
}

TEST(RenderResponse, RoundTripsThroughParse) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "x1", "y2"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Segment> segments;
    const int m = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < m; ++j) {
      auto body = [&] {
        std::string s;
        const int n = static_cast<int>(rng() % 4);
        for (int w = 0; w < n; ++w) {
          if (!s.empty()) s += ' ';
          s += words[rng() % words.size()];
        }
        return s;
      };
      segments.push_back(Segment{j, body(), body()});
    }
    SegmentedResponse parsed = parse_response(render_response(segments));
    ASSERT_EQ(parsed.segments.size(), segments.size());
    for (int j = 0; j < m; ++j) EXPECT_EQ(parsed.segments[j], segments[j]);
  }
}

TEST(ParseResponse, WhitespaceAmountBetweenBlocksIrrelevant) {
  const std::string spaced = std::string("  \n\n") + kOneBlock + "\t\n   start_sub_instruction_1 " +
                             "start_think deep end_think start_answer out end_answer " +
                             "end_sub_instruction_1\n\n  ";
  SegmentedResponse a = parse_response(spaced);
  std::string compact = spaced;
  // collapse every whitespace run to a single space
  std::string collapsed;
  bool in_space = false;
  for (char c : compact) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (space && !in_space) collapsed += ' ';
    if (!space) collapsed += c;
    in_space = space;
  }
  SegmentedResponse b = parse_response(collapsed);
  ASSERT_EQ(a.segments.size(), b.segments.size());
  for (std::size_t j = 0; j < a.segments.size(); ++j) EXPECT_EQ(a.segments[j], b.segments[j]);
}

// ---- token attribution ----

std::vector<std::string> toks(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

TEST(AttributeTokens, FullBlockInclusive) {
  const auto labels = attribute_tokens(toks({"start_sub_instruction_0", "start_think", "w",
                                             "end_think", "start_answer", "w", "end_answer",
                                             "end_sub_instruction_0"}));
  ASSERT_EQ(labels.size(), 8u);
  for (const auto& l : labels) EXPECT_EQ(l, std::optional<int>(0));
}

TEST(AttributeTokens, NoMarkersMeansNoLabels) {
  const auto labels = attribute_tokens(toks({"w", "w"}));
  EXPECT_EQ(labels, (std::vector<std::optional<int>>{std::nullopt, std::nullopt}));
}

TEST(AttributeTokens, InterBlockTokenUnattributed) {
  const auto labels = attribute_tokens(toks({"start_sub_instruction_0", "w",
                                             "end_sub_instruction_0", "w",
                                             "start_sub_instruction_1", "w",
                                             "end_sub_instruction_1"}));
  const std::vector<std::optional<int>> expected = {0, 0, 0, std::nullopt, 1, 1, 1};
  EXPECT_EQ(labels, expected);
}

TEST(AttributeTokens, ViolationLeavesRemainderUnattributed) {
  // second block opens with the wrong index
  const auto labels = attribute_tokens(toks({"start_sub_instruction_0", "w",
                                             "end_sub_instruction_0", "start_sub_instruction_2",
                                             "w"}));
  const std::vector<std::optional<int>> expected = {0, 0, 0, std::nullopt, std::nullopt};
  EXPECT_EQ(labels, expected);
}

TEST(AttributeTokens, LabelsConstantWithinBlocks) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> tokens;
    const int m = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < m; ++j) {
      tokens.push_back(start_sub_marker(j));
      const int n = static_cast<int>(rng() % 5);
      for (int w = 0; w < n; ++w) tokens.push_back("w" + std::to_string(w));
      tokens.push_back(end_sub_marker(j));
      if (rng() % 2) tokens.push_back("pad");
    }
    const auto labels = attribute_tokens(tokens);
    int open = -1;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (auto idx = parse_sub_start(tokens[t])) open = *idx;
      if (open >= 0) {
        EXPECT_EQ(labels[t], std::optional<int>(open));
      } else {
        EXPECT_EQ(labels[t], std::nullopt);
      }
      if (auto idx = parse_sub_end(tokens[t]); idx && *idx == open) open = -1;
    }
  }
}

}  // namespace
}  // namespace eif
