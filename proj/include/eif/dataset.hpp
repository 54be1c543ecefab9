#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eif/errors.hpp"
#include "eif/rules.hpp"
#include "eif/taxonomy.hpp"

namespace eif {

struct Constraint {
  std::string text;
  ConstraintType type = ConstraintType::inclusion;
  std::optional<RuleSpec> checker;
};

struct Instruction {
  std::string text;
  std::vector<Constraint> constraints;  // length c_{i,j} >= 1
  std::optional<TaskCategory> category;
};

enum class Scenario { plain_text, dyadic_dialogue, multi_party_dialogue };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::plain_text: return "plain_text";
    case Scenario::dyadic_dialogue: return "dyadic_dialogue";
    case Scenario::multi_party_dialogue: return "multi_party_dialogue";
  }
  return "";
}

inline std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "plain_text") return Scenario::plain_text;
  if (s == "dyadic_dialogue") return Scenario::dyadic_dialogue;
  if (s == "multi_party_dialogue") return Scenario::multi_party_dialogue;
  return std::nullopt;
}

struct Instance {
  std::string id;
  Scenario scenario = Scenario::plain_text;
  std::string context;
  std::vector<Instruction> instructions;  // length m_i >= 1
};

struct Dataset {
  std::vector<Instance> instances;
};

struct DatasetStats {
  int count = 0;
  int min_constraints = 0;
  int max_constraints = 0;
  double avg_constraints = 0.0;
  std::map<int, int> instruction_count_histogram;  // m_i -> #instances
};

inline int total_constraints(const Instance& inst) {
  int total = 0;
  for (const Instruction& ins : inst.instructions) {
    total += static_cast<int>(ins.constraints.size());
  }
  return total;
}

// ---- JSONL schema ----

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["id"] = inst.id;
  j["scenario"] = to_string(inst.scenario);
  j["context"] = inst.context;
  j["instructions"] = nlohmann::json::array();
  for (const Instruction& ins : inst.instructions) {
    nlohmann::ordered_json ji;
    ji["text"] = ins.text;
    if (ins.category) ji["category"] = to_string(*ins.category);
    ji["constraints"] = nlohmann::json::array();
    for (const Constraint& c : ins.constraints) {
      nlohmann::ordered_json jc;
      jc["text"] = c.text;
      jc["type"] = to_string(c.type);
      if (c.checker) jc["checker"] = rule_to_json(*c.checker);
      ji["constraints"].push_back(jc);
    }
    j["instructions"].push_back(ji);
  }
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j, int line) {
  auto fail = [&](const std::string& msg) -> SchemaError { return SchemaError(msg, line); };
  if (!j.is_object()) throw fail("instance record must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw fail("missing string field \"id\"");
  if (!j.contains("scenario") || !j["scenario"].is_string()) {
    throw fail("missing string field \"scenario\"");
  }
  Instance inst;
  inst.id = j["id"].get<std::string>();
  auto scenario = parse_scenario(j["scenario"].get<std::string>());
  if (!scenario) throw fail("unknown scenario \"" + j["scenario"].get<std::string>() + "\"");
  inst.scenario = *scenario;
  inst.context = j.value("context", std::string{});
  if (!j.contains("instructions") || !j["instructions"].is_array() || j["instructions"].empty()) {
    throw fail("instance \"" + inst.id + "\" requires a nonempty instructions array");
  }
  for (const auto& ji : j["instructions"]) {
    Instruction ins;
    if (!ji.contains("text") || !ji["text"].is_string()) {
      throw fail("instruction requires string field \"text\"");
    }
    ins.text = ji["text"].get<std::string>();
    if (ji.contains("category")) {
      auto cat = parse_task_category(ji["category"].get<std::string>());
      if (!cat) throw fail("unknown task category \"" + ji["category"].get<std::string>() + "\"");
      ins.category = *cat;
    }
    if (!ji.contains("constraints") || !ji["constraints"].is_array() || ji["constraints"].empty()) {
      throw fail("instruction requires a nonempty constraints array");
    }
    for (const auto& jc : ji["constraints"]) {
      Constraint c;
      if (!jc.contains("text") || !jc["text"].is_string() || jc["text"].get<std::string>().empty()) {
        throw fail("constraint requires a nonempty string field \"text\"");
      }
      c.text = jc["text"].get<std::string>();
      if (!jc.contains("type") || !jc["type"].is_string()) {
        throw fail("constraint requires string field \"type\"");
      }
      auto type = parse_constraint_type(jc["type"].get<std::string>());
      if (!type) throw fail("unknown constraint type \"" + jc["type"].get<std::string>() + "\"");
      c.type = *type;
      if (jc.contains("checker") && !jc["checker"].is_null()) {
        try {
          c.checker = rule_from_json(jc["checker"]);
        } catch (const SchemaError& e) {
          throw fail(e.what());
        }
      }
      ins.constraints.push_back(std::move(c));
    }
    inst.instructions.push_back(std::move(ins));
  }
  return inst;
}

// One instance per line, UTF-8 JSONL. Blank lines are skipped.
inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  Dataset d;
  std::map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
    Instance inst = instance_from_json(j, line_no);
    if (auto it = seen.find(inst.id); it != seen.end()) throw DuplicateIdError(inst.id);
    seen.emplace(inst.id, line_no);
    d.instances.push_back(std::move(inst));
  }
  return d;
}

inline void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  for (const Instance& inst : d.instances) {
    out << instance_to_json(inst).dump() << '\n';
  }
}

// min/max/avg of the total constraint count per instance and the histogram
// of instruction counts m_i.
inline DatasetStats dataset_stats(const Dataset& d) {
  if (d.instances.empty()) throw EmptyDatasetError("dataset has no instances");
  DatasetStats s;
  s.count = static_cast<int>(d.instances.size());
  long long sum = 0;
  s.min_constraints = total_constraints(d.instances.front());
  s.max_constraints = s.min_constraints;
  for (const Instance& inst : d.instances) {
    int total = total_constraints(inst);
    sum += total;
    s.min_constraints = std::min(s.min_constraints, total);
    s.max_constraints = std::max(s.max_constraints, total);
    s.instruction_count_histogram[static_cast<int>(inst.instructions.size())] += 1;
  }
  s.avg_constraints = static_cast<double>(sum) / s.count;
  return s;
}

inline std::map<Scenario, DatasetStats> dataset_stats_per_scenario(const Dataset& d) {
  std::map<Scenario, Dataset> split;
  for (const Instance& inst : d.instances) split[inst.scenario].instances.push_back(inst);
  std::map<Scenario, DatasetStats> out;
  for (const auto& [scenario, subset] : split) out[scenario] = dataset_stats(subset);
  return out;
}

}  // namespace eif
