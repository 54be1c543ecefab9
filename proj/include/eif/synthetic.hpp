#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eif/dataset.hpp"
#include "eif/errors.hpp"
#include "eif/optimizer.hpp"
#include "eif/policy.hpp"
#include "eif/segment.hpp"

namespace eif {

// Deterministic generator of rule-checkable instances for toy training.
// Every instruction's constraints are satisfied by the answer
// "<keyword> ." so an all-satisfied response always exists.

struct SyntheticTaskSpec {
  int num_instances = 8;
  std::pair<int, int> instructions_per_instance{3, 3};
  std::pair<int, int> constraints_per_instruction{2, 3};
  std::vector<std::string> keywords{"alpha", "beta", "gamma"};
  std::uint64_t seed = 0;
};

inline void validate(const SyntheticTaskSpec& spec) {
  if (spec.num_instances < 1) throw SpecError("num_instances must be positive");
  auto check_range = [](std::pair<int, int> r, const char* name) {
    if (r.first < 1 || r.first > r.second) {
      throw SpecError(std::string(name) + " range must satisfy 1 <= lo <= hi");
    }
  };
  check_range(spec.instructions_per_instance, "instructions_per_instance");
  check_range(spec.constraints_per_instruction, "constraints_per_instruction");
  if (spec.keywords.empty()) throw SpecError("keyword pool must be nonempty");
  for (const std::string& kw : spec.keywords) {
    if (kw.empty()) throw SpecError("keywords must be nonempty strings");
  }
}

namespace detail {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  if (lo == hi) return lo;
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace detail

inline Dataset gen_tasks(const SyntheticTaskSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const auto& kws = spec.keywords;

  // extra constraints beyond must_include, all satisfied by "<kw> ."
  const auto extra_constraint = [&](int slot, const std::string& kw) -> Constraint {
    switch (slot % 5) {
      case 0:
        return {"use at most 4 words", ConstraintType::numerical, MaxWords{4}};
      case 1:
        return {"finish with a period", ConstraintType::text_pattern, EndsWith{"."}};
      case 2:
        return {"do not mention zzz", ConstraintType::exclusion, MustExclude{"zzz"}};
      case 3:
        return {"open with the keyword " + kw, ConstraintType::template_, StartsWith{kw}};
      default:
        return {"keep the answer between 1 and 40 characters", ConstraintType::output_format,
                CharLengthBetween{1, 40}};
    }
  };

  Dataset d;
  for (int q = 0; q < spec.num_instances; ++q) {
    Instance inst;
    inst.id = "task-" + std::to_string(q);
    inst.scenario = Scenario::plain_text;
    inst.context = "Synthetic toy-training instance.";
    const int m = detail::uniform_int(rng, spec.instructions_per_instance.first,
                                      spec.instructions_per_instance.second);
    for (int j = 0; j < m; ++j) {
      const std::string& kw = kws[(q + j) % kws.size()];
      Instruction ins;
      ins.text = "Answer sub-task " + std::to_string(j) + " using the keyword " + kw + ".";
      ins.category = kAllTaskCategories[(q + j) % kAllTaskCategories.size()];
      const int c = detail::uniform_int(rng, spec.constraints_per_instruction.first,
                                        spec.constraints_per_instruction.second);
      ins.constraints.push_back(
          {"mention the keyword " + kw, ConstraintType::inclusion, MustInclude{kw}});
      for (int k = 1; k < c; ++k) {
        ins.constraints.push_back(extra_constraint(q + j + k, kw));
      }
      inst.instructions.push_back(std::move(ins));
    }
    d.instances.push_back(std::move(inst));
  }
  return d;
}

// the keyword each (instance, instruction) pair expects
inline std::string expected_keyword(const SyntheticTaskSpec& spec, int query, int instruction) {
  return spec.keywords[(query + instruction) % spec.keywords.size()];
}

// Handcrafted response satisfying every constraint of every instruction.
inline std::string perfect_response(const SyntheticTaskSpec& spec, const Instance& inst,
                                    int query) {
  std::vector<Segment> segments;
  for (std::size_t j = 0; j < inst.instructions.size(); ++j) {
    segments.push_back(Segment{static_cast<int>(j), "hmm",
                               expected_keyword(spec, query, static_cast<int>(j)) + " ."});
  }
  return render_response(segments);
}

inline std::map<std::string, std::string> perfect_responses(const SyntheticTaskSpec& spec,
                                                            const Dataset& d) {
  std::map<std::string, std::string> out;
  for (std::size_t q = 0; q < d.instances.size(); ++q) {
    out[d.instances[q].id] = perfect_response(spec, d.instances[q], static_cast<int>(q));
  }
  return out;
}

// Vocabulary shared by all toy tasks: segment markers up to the largest
// instruction count, the answer/think words, and the END terminal.
inline Vocabulary toy_vocabulary(int max_instructions, const std::vector<std::string>& keywords) {
  std::vector<std::string> symbols;
  for (int x = 0; x < max_instructions; ++x) symbols.push_back(start_sub_marker(x));
  for (int x = 0; x < max_instructions; ++x) symbols.push_back(end_sub_marker(x));
  symbols.emplace_back(kStartThink);
  symbols.emplace_back(kEndThink);
  symbols.emplace_back(kStartAnswer);
  symbols.emplace_back(kEndAnswer);
  for (const std::string& kw : keywords) symbols.push_back(kw);
  symbols.emplace_back("hmm");
  symbols.emplace_back(".");
  symbols.emplace_back("zzz");
  symbols.emplace_back("END");
  return Vocabulary::from_symbols(std::move(symbols));
}

// Initial policy biased toward the response skeleton, the way RL fine-tuning
// starts from an instruction-tuned model: structural transitions get a logit
// boost, keyword choice and block-closing stay spread for exploration.
inline PolicyParams toy_initial_policy(const Vocabulary& vocab, int max_instructions,
                                       int num_queries, double format_bias = 3.0) {
  PolicyParams p = PolicyParams::zeros(vocab.size());
  auto boost = [&](int context, const std::string& symbol, double b) {
    p.logits[context][vocab.id_of(symbol)] += b;
  };
  auto after = [&](const std::string& symbol) { return context_after(vocab.id_of(symbol)); };

  boost(kBosContext, start_sub_marker(0), format_bias);
  for (int x = 0; x < max_instructions; ++x) {
    boost(after(start_sub_marker(x)), std::string(kStartThink), format_bias);
    // closing marker choice is ambiguous under an order-1 context: spread
    boost(after(std::string(kEndAnswer)), end_sub_marker(x), format_bias);
    if (x + 1 < max_instructions) {
      boost(after(end_sub_marker(x)), start_sub_marker(x + 1), format_bias);
    }
    boost(after(end_sub_marker(x)), "END", format_bias);
  }
  boost(after(std::string(kStartThink)), "hmm", format_bias);
  boost(after("hmm"), std::string(kEndThink), format_bias);
  boost(after(std::string(kEndThink)), std::string(kStartAnswer), format_bias);
  // keyword exploration inside answers
  for (const std::string& symbol : vocab.symbols) {
    if (symbol == "hmm" || symbol == "." || symbol == "zzz" || symbol == "END") continue;
    if (parse_sub_start(symbol) || parse_sub_end(symbol) || is_structural_marker(symbol)) continue;
    boost(after(std::string(kStartAnswer)), symbol, format_bias);
    boost(after(symbol), ".", format_bias);
  }
  boost(after("."), std::string(kEndAnswer), format_bias);

  for (int q = 0; q < num_queries; ++q) {
    p.query_offsets[q] = std::vector<double>(vocab.size(), 0.0);
  }
  return p;
}

inline TaskSuite make_task_suite(const SyntheticTaskSpec& spec, double format_bias = 3.0) {
  TaskSuite suite;
  suite.tasks = gen_tasks(spec);
  int max_instructions = 0;
  for (const Instance& inst : suite.tasks.instances) {
    max_instructions = std::max(max_instructions, static_cast<int>(inst.instructions.size()));
  }
  suite.vocab = toy_vocabulary(max_instructions, spec.keywords);
  suite.init_policy = toy_initial_policy(suite.vocab, max_instructions,
                                         static_cast<int>(suite.tasks.instances.size()),
                                         format_bias);
  return suite;
}

}  // namespace eif
