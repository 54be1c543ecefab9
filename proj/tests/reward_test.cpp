#include "eif/reward.hpp"

#include <gtest/gtest.h>

#include <random>

#include "eif/segment.hpp"

namespace eif {
namespace {

Instance two_instruction_instance() {
  Instance inst;
  inst.id = "inst-a";
  inst.scenario = Scenario::plain_text;
  Instruction first;
  first.text = "mention alpha";
  first.constraints.push_back({"contains alpha", ConstraintType::inclusion, MustInclude{"alpha"}});
  first.constraints.push_back({"short", ConstraintType::numerical, MaxWords{5}});
  Instruction second;
  second.text = "mention beta";
  second.constraints.push_back({"contains beta", ConstraintType::inclusion, MustInclude{"beta"}});
  inst.instructions = {first, second};
  return inst;
}

SegmentedResponse response_for(const std::vector<std::pair<int, std::string>>& answers) {
  std::vector<Segment> segments;
  for (const auto& [index, answer] : answers) segments.push_back({index, "t", answer});
  return parse_response(render_response(segments));
}

TEST(OverallReward, HandDerivedBreakdown) {
  ScoreMatrix s{{{1, 1}, {1, 0}}};
  RewardBreakdown b = overall_reward(s, 1);
  EXPECT_DOUBLE_EQ(b.ila, 0.5);
  EXPECT_DOUBLE_EQ(b.cla, 0.75);
  EXPECT_EQ(b.full, 0);
  EXPECT_DOUBLE_EQ(b.overall, 2.25);
  EXPECT_EQ(b.per_instruction, (std::vector<int>{1, 0}));
}

TEST(OverallReward, Extremes) {
  ScoreMatrix ones{{{1, 1}, {1, 1}}};
  RewardBreakdown best = overall_reward(ones, 1);
  EXPECT_DOUBLE_EQ(best.overall, 4.0);
  EXPECT_EQ(best.per_instruction, (std::vector<int>{1, 1}));

  ScoreMatrix zeros{{{0, 0}, {0, 0}}};
  RewardBreakdown worst = overall_reward(zeros, 0);
  EXPECT_DOUBLE_EQ(worst.overall, 0.0);
}

TEST(OverallReward, MonotoneUnderScoreFlips) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    ScoreMatrix s;
    const int rows = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < rows; ++j) {
      std::vector<int> row(1 + rng() % 4);
      for (auto& v : row) v = static_cast<int>(rng() % 2);
      s.rows.push_back(std::move(row));
    }
    const int fmt = static_cast<int>(rng() % 2);
    const RewardBreakdown before = overall_reward(s, fmt);

    // flip one zero (if any) to one
    for (auto& row : s.rows) {
      for (auto& v : row) {
        if (v == 0) {
          v = 1;
          goto flipped;
        }
      }
    }
  flipped:
    const RewardBreakdown after = overall_reward(s, fmt);
    EXPECT_GE(after.overall, before.overall);
    for (std::size_t j = 0; j < before.per_instruction.size(); ++j) {
      EXPECT_GE(after.per_instruction[j], before.per_instruction[j]);
    }
  }
}

TEST(OverallReward, PerInstructionIsConstraintProduct) {
  ScoreMatrix s{{{1, 1, 1}, {1, 0, 1}, {0, 0, 0}}};
  RewardBreakdown b = overall_reward(s, 0);
  EXPECT_EQ(b.per_instruction, (std::vector<int>{1, 0, 0}));
}

TEST(JudgeInstance, RuleStrategySatisfiedAnswers) {
  Instance inst = two_instruction_instance();
  SegmentedResponse resp = response_for({{0, "alpha here"}, {1, "beta here"}});
  ScoreMatrix s = judge_instance(inst, resp, rule_judge());
  EXPECT_EQ(s.rows, (std::vector<std::vector<int>>{{1, 1}, {1}}));
}

TEST(JudgeInstance, MissingSegmentScoresZeroRow) {
  Instance inst = two_instruction_instance();
  SegmentedResponse resp = response_for({{0, "alpha here"}});
  ScoreMatrix s = judge_instance(inst, resp, rule_judge());
  EXPECT_EQ(s.rows, (std::vector<std::vector<int>>{{1, 1}, {0}}));
}

TEST(JudgeInstance, RuleStrategyIsDeterministic) {
  Instance inst = two_instruction_instance();
  SegmentedResponse resp = response_for({{0, "alpha alpha alpha alpha alpha alpha"}, {1, "nope"}});
  ScoreMatrix a = judge_instance(inst, resp, rule_judge());
  ScoreMatrix b = judge_instance(inst, resp, rule_judge());
  EXPECT_EQ(a.rows, b.rows);
  // first instruction: includes alpha but exceeds 5 words
  EXPECT_EQ(a.rows[0], (std::vector<int>{1, 0}));
  EXPECT_EQ(a.rows[1], (std::vector<int>{0}));
}

TEST(JudgeInstance, RuleStrategyRequiresCheckers) {
  Instance inst = two_instruction_instance();
  inst.instructions[0].constraints[0].checker.reset();
  SegmentedResponse resp = response_for({{0, "alpha"}, {1, "beta"}});
  EXPECT_THROW(judge_instance(inst, resp, rule_judge()), MissingRuleError);
}

TEST(JudgeInstance, MockTableEchoedForCoveredInstructions) {
  Instance inst = two_instruction_instance();
  Judge judge = mock_judge({{"inst-a", {{1, 0}, {1}}}});
  SegmentedResponse full = response_for({{0, "x"}, {1, "y"}});
  EXPECT_EQ(judge_instance(inst, full, judge).rows,
            (std::vector<std::vector<int>>{{1, 0}, {1}}));

  SegmentedResponse partial = response_for({{0, "x"}});
  EXPECT_EQ(judge_instance(inst, partial, judge).rows,
            (std::vector<std::vector<int>>{{1, 0}, {0}}));
}

TEST(JudgeInstance, MockTableShapeChecked) {
  Instance inst = two_instruction_instance();
  SegmentedResponse resp = response_for({{0, "x"}, {1, "y"}});
  EXPECT_THROW(judge_instance(inst, resp, mock_judge({{"inst-a", {{1, 0}}}})), ShapeError);
  EXPECT_THROW(judge_instance(inst, resp, mock_judge({{"other", {{1, 0}, {1}}}})),
               JudgeUnavailableError);
}

TEST(JudgeInstance, ExtraSegmentsIgnored) {
  Instance inst = two_instruction_instance();
  SegmentedResponse resp =
      response_for({{0, "alpha"}, {1, "beta"}, {2, "spurious"}});
  ScoreMatrix s = judge_instance(inst, resp, rule_judge());
  EXPECT_EQ(s.rows.size(), 2u);
}

}  // namespace
}  // namespace eif
