#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eif/dataset.hpp"
#include "eif/errors.hpp"
#include "eif/judge_client.hpp"
#include "eif/metrics.hpp"
#include "eif/rules.hpp"
#include "eif/segment.hpp"

namespace eif {

enum class JudgeStrategy { rule, mock, remote };

// Verdict source. The rule strategy requires every constraint to carry a
// RuleSpec; mock echoes a fixed table; remote delegates to the judge client.
struct Judge {
  JudgeStrategy strategy = JudgeStrategy::rule;
  std::map<std::string, std::vector<std::vector<int>>> mock_table;
  std::optional<JudgeConfig> remote;
};

inline Judge rule_judge() { return Judge{JudgeStrategy::rule, {}, std::nullopt}; }

inline Judge mock_judge(std::map<std::string, std::vector<std::vector<int>>> table) {
  return Judge{JudgeStrategy::mock, std::move(table), std::nullopt};
}

inline Judge remote_judge(JudgeConfig cfg) {
  return Judge{JudgeStrategy::remote, {}, std::move(cfg)};
}

// JSON map instance_id -> [[0|1,...],...]
inline std::map<std::string, std::vector<std::vector<int>>> load_mock_table(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock verdict table: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw SchemaError("mock verdict table must be a JSON object");
  }
  std::map<std::string, std::vector<std::vector<int>>> table;
  for (const auto& [id, rows] : j.items()) {
    if (!rows.is_array()) throw SchemaError("mock verdicts for \"" + id + "\" must be an array");
    std::vector<std::vector<int>> matrix;
    for (const auto& row : rows) {
      std::vector<int> r;
      for (const auto& v : row) {
        int value = v.get<int>();
        if (value != 0 && value != 1) {
          throw SchemaError("mock verdicts must be 0 or 1 (instance \"" + id + "\")");
        }
        r.push_back(value);
      }
      matrix.push_back(std::move(r));
    }
    table.emplace(id, std::move(matrix));
  }
  return table;
}

// S_{i,j,k} for one instance. Instructions without a matching segment score
// a zero row; segments beyond the instance's instruction count are ignored.
inline ScoreMatrix judge_instance(const Instance& inst, const SegmentedResponse& resp,
                                  const Judge& judge) {
  const std::size_t m = inst.instructions.size();
  ScoreMatrix s;
  s.rows.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    s.rows[j].assign(inst.instructions[j].constraints.size(), 0);
  }

  std::vector<const Segment*> segment_for(m, nullptr);
  for (const Segment& seg : resp.segments) {
    if (seg.instruction_index >= 0 && static_cast<std::size_t>(seg.instruction_index) < m) {
      segment_for[seg.instruction_index] = &seg;
    }
  }

  switch (judge.strategy) {
    case JudgeStrategy::rule: {
      for (std::size_t j = 0; j < m; ++j) {
        if (segment_for[j] == nullptr) continue;
        const std::string& answer = segment_for[j]->answer;
        const auto& constraints = inst.instructions[j].constraints;
        for (std::size_t k = 0; k < constraints.size(); ++k) {
          if (!constraints[k].checker) {
            throw MissingRuleError("instance \"" + inst.id + "\" instruction " +
                                   std::to_string(j) + " constraint " + std::to_string(k) +
                                   " has no rule checker");
          }
          s.rows[j][k] = check_rule(*constraints[k].checker, answer);
        }
      }
      return s;
    }
    case JudgeStrategy::mock: {
      auto it = judge.mock_table.find(inst.id);
      if (it == judge.mock_table.end()) {
        throw JudgeUnavailableError("no mock verdicts for instance \"" + inst.id + "\"");
      }
      const auto& table = it->second;
      if (table.size() != m) {
        throw ShapeError("mock verdicts for \"" + inst.id + "\" have wrong instruction count");
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (table[j].size() != s.rows[j].size()) {
          throw ShapeError("mock verdicts for \"" + inst.id + "\" have wrong constraint count");
        }
        if (segment_for[j] == nullptr) continue;
        s.rows[j] = table[j];
      }
      return s;
    }
    case JudgeStrategy::remote: {
      if (!judge.remote) throw ConfigError("remote judge requires a JudgeConfig");
      std::vector<VerdictRequest> reqs;
      std::vector<std::pair<std::size_t, std::size_t>> slots;
      for (std::size_t j = 0; j < m; ++j) {
        if (segment_for[j] == nullptr) continue;
        const auto& constraints = inst.instructions[j].constraints;
        for (std::size_t k = 0; k < constraints.size(); ++k) {
          reqs.push_back(VerdictRequest{inst.instructions[j].text, constraints[k].text,
                                        segment_for[j]->answer});
          slots.emplace_back(j, k);
        }
      }
      std::vector<int> verdicts = verdict_batch(reqs, *judge.remote);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        s.rows[slots[i].first][slots[i].second] = verdicts[i];
      }
      return s;
    }
  }
  return s;
}

// r^o breakdown. overall = ILA + CLA + full-satisfaction product + format;
// per_instruction[j] is the r^phi value for instruction j.
struct RewardBreakdown {
  double ila = 0.0;
  double cla = 0.0;
  int full = 0;
  int format = 0;
  double overall = 0.0;
  std::vector<int> per_instruction;
};

inline RewardBreakdown overall_reward(const ScoreMatrix& s, int format) {
  RewardBreakdown b;
  b.ila = ila_instance(s);
  b.cla = cla_instance(s);
  b.full = full_satisfaction(s);
  b.format = format;
  b.overall = b.ila + b.cla + b.full + b.format;
  b.per_instruction.reserve(s.rows.size());
  for (const auto& row : s.rows) {
    int prod = 1;
    for (int v : row) prod *= v;
    b.per_instruction.push_back(prod);
  }
  return b;
}

}  // namespace eif
