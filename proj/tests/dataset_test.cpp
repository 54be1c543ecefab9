#include "eif/dataset.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace eif {
namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    path_ = std::filesystem::temp_directory_path() /
            ("eif_dataset_test_" + std::to_string(counter_++) + ".jsonl");
    std::ofstream out(path_);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

const char* kValidLine =
    R"({"id":"a","scenario":"plain_text","context":"ctx","instructions":[{"text":"do x","category":"text_generation","constraints":[{"text":"short","type":"numerical","checker":{"kind":"max_words","limit":30}}]}]})";

TEST(Dataset, LoadsMinimalValidFile) {
  TempFile f(std::string(kValidLine) + "\n");
  Dataset d = load_dataset(f.path());
  ASSERT_EQ(d.instances.size(), 1u);
  EXPECT_EQ(d.instances[0].id, "a");
  EXPECT_EQ(d.instances[0].scenario, Scenario::plain_text);
  ASSERT_EQ(d.instances[0].instructions.size(), 1u);
  EXPECT_TRUE(d.instances[0].instructions[0].constraints[0].checker.has_value());
}

TEST(Dataset, RejectsUnknownConstraintTypeWithLineNumber) {
  TempFile f(
      R"({"id":"a","scenario":"plain_text","context":"","instructions":[{"text":"t","constraints":[{"text":"c","type":"speed_limit"}]}]})"
      "\n");
  try {
    load_dataset(f.path());
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("speed_limit"), std::string::npos);
  }
}

TEST(Dataset, RejectsDuplicateIds) {
  TempFile f(std::string(kValidLine) + "\n" + kValidLine + "\n");
  try {
    load_dataset(f.path());
    FAIL() << "expected DuplicateIdError";
  } catch (const DuplicateIdError& e) {
    EXPECT_EQ(e.id(), "a");
  }
}

TEST(Dataset, RejectsEmptyInstructionsAndConstraints) {
  TempFile no_instructions(
      R"({"id":"a","scenario":"plain_text","context":"","instructions":[]})" "\n");
  EXPECT_THROW(load_dataset(no_instructions.path()), SchemaError);
  TempFile no_constraints(
      R"({"id":"a","scenario":"plain_text","context":"","instructions":[{"text":"t","constraints":[]}]})"
      "\n");
  EXPECT_THROW(load_dataset(no_constraints.path()), SchemaError);
}

TEST(Dataset, MissingFileIsIoError) {
  EXPECT_THROW(load_dataset("/nonexistent/nowhere.jsonl"), IoError);
}

TEST(Dataset, UnknownScenarioRejected) {
  TempFile f(
      R"({"id":"a","scenario":"group_chat","context":"","instructions":[{"text":"t","constraints":[{"text":"c","type":"theme"}]}]})"
      "\n");
  EXPECT_THROW(load_dataset(f.path()), SchemaError);
}

Instance make_instance(const std::string& id, Scenario scenario, int instructions,
                       int constraints_each) {
  Instance inst;
  inst.id = id;
  inst.scenario = scenario;
  inst.context = "ctx";
  for (int j = 0; j < instructions; ++j) {
    Instruction ins;
    ins.text = "instruction " + std::to_string(j);
    for (int k = 0; k < constraints_each; ++k) {
      ins.constraints.push_back({"constraint " + std::to_string(k), ConstraintType::theme, {}});
    }
    inst.instructions.push_back(std::move(ins));
  }
  return inst;
}

TEST(DatasetStatsTest, TwoInstanceTotals) {
  // totals {70, 80} -> min 70, max 80, avg 75.0
  Dataset d;
  d.instances.push_back(make_instance("a", Scenario::plain_text, 7, 10));
  d.instances.push_back(make_instance("b", Scenario::plain_text, 8, 10));
  DatasetStats s = dataset_stats(d);
  EXPECT_EQ(s.count, 2);
  EXPECT_EQ(s.min_constraints, 70);
  EXPECT_EQ(s.max_constraints, 80);
  EXPECT_DOUBLE_EQ(s.avg_constraints, 75.0);
}

TEST(DatasetStatsTest, SingleInstance) {
  Dataset d;
  d.instances.push_back(make_instance("a", Scenario::plain_text, 3, 2));
  DatasetStats s = dataset_stats(d);
  EXPECT_EQ(s.min_constraints, 6);
  EXPECT_EQ(s.max_constraints, 6);
  EXPECT_DOUBLE_EQ(s.avg_constraints, 6.0);
  ASSERT_EQ(s.instruction_count_histogram.size(), 1u);
  EXPECT_EQ(s.instruction_count_histogram.at(3), 1);
}

TEST(DatasetStatsTest, EmptyDatasetThrows) {
  EXPECT_THROW(dataset_stats(Dataset{}), EmptyDatasetError);
}

TEST(DatasetStatsTest, OrderingAndHistogramInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset d;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      d.instances.push_back(make_instance("i" + std::to_string(i), Scenario::plain_text,
                                          1 + static_cast<int>(rng() % 5),
                                          1 + static_cast<int>(rng() % 6)));
    }
    DatasetStats s = dataset_stats(d);
    EXPECT_LE(s.min_constraints, s.avg_constraints);
    EXPECT_LE(s.avg_constraints, s.max_constraints);
    int histogram_total = 0;
    for (const auto& [m, c] : s.instruction_count_histogram) histogram_total += c;
    EXPECT_EQ(histogram_total, s.count);
  }
}

TEST(DatasetStatsTest, PerScenarioSplit) {
  Dataset d;
  d.instances.push_back(make_instance("a", Scenario::plain_text, 2, 3));
  d.instances.push_back(make_instance("b", Scenario::dyadic_dialogue, 4, 5));
  auto per = dataset_stats_per_scenario(d);
  ASSERT_EQ(per.size(), 2u);
  EXPECT_EQ(per.at(Scenario::plain_text).max_constraints, 6);
  EXPECT_EQ(per.at(Scenario::dyadic_dialogue).max_constraints, 20);
}

TEST(Dataset, SaveLoadRoundTrip) {
  std::mt19937_64 rng(11);
  Dataset d;
  for (int i = 0; i < 8; ++i) {
    Instance inst = make_instance("inst-" + std::to_string(i),
                                  i % 2 ? Scenario::dyadic_dialogue : Scenario::multi_party_dialogue,
                                  1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    inst.instructions[0].category = kAllTaskCategories[i % 8];
    inst.instructions[0].constraints[0].type = kAllConstraintTypes[i % 24];
    inst.instructions[0].constraints[0].checker = MustInclude{"kw" + std::to_string(i)};
    d.instances.push_back(std::move(inst));
  }
  auto path = std::filesystem::temp_directory_path() / "eif_dataset_roundtrip.jsonl";
  save_dataset(d, path.string());
  Dataset back = load_dataset(path.string());
  std::filesystem::remove(path);

  ASSERT_EQ(back.instances.size(), d.instances.size());
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    EXPECT_EQ(instance_to_json(back.instances[i]), instance_to_json(d.instances[i]));
  }
}

}  // namespace
}  // namespace eif
