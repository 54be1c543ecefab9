// eif — benchmark statistics, constraint judging, metrics reports, synthetic
// task generation, and toy GRPO/SegPO training.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eif/dataset.hpp"
#include "eif/io.hpp"
#include "eif/judge_client.hpp"
#include "eif/metrics.hpp"
#include "eif/optimizer.hpp"
#include "eif/reward.hpp"
#include "eif/segment.hpp"
#include "eif/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

void print_stats(std::ostream& out, const std::string& scenario, const eif::DatasetStats& s) {
  out << "scenario " << scenario << "\n";
  out << "count " << s.count << "\n";
  out << "min_constraints " << s.min_constraints << "\n";
  out << "max_constraints " << s.max_constraints << "\n";
  out << "avg_constraints " << eif::round4(s.avg_constraints) << "\n";
  out << "instruction_histogram";
  for (const auto& [m, n] : s.instruction_count_histogram) out << ' ' << m << ':' << n;
  out << "\n";
}

std::string histogram_field(const eif::DatasetStats& s) {
  std::string field;
  for (const auto& [m, n] : s.instruction_count_histogram) {
    if (!field.empty()) field += ';';
    field += std::to_string(m) + ':' + std::to_string(n);
  }
  return field;
}

void write_stats_csv(const std::vector<std::pair<std::string, eif::DatasetStats>>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw eif::IoError("cannot write stats file: " + path);
  out << "scenario,count,min_constraints,max_constraints,avg_constraints,instruction_histogram\n";
  for (const auto& [name, s] : rows) {
    out << name << ',' << s.count << ',' << s.min_constraints << ',' << s.max_constraints << ','
        << eif::round4(s.avg_constraints) << ',' << histogram_field(s) << '\n';
  }
}

struct StatsArgs {
  std::string dataset_path;
  bool per_scenario = false;
  std::string out_path;
};

int run_stats(const StatsArgs& args) {
  const eif::Dataset d = eif::load_dataset(args.dataset_path);
  std::vector<std::pair<std::string, eif::DatasetStats>> rows;
  if (args.per_scenario) {
    for (const auto& [scenario, stats] : eif::dataset_stats_per_scenario(d)) {
      rows.emplace_back(std::string(eif::to_string(scenario)), stats);
    }
  } else {
    rows.emplace_back("all", eif::dataset_stats(d));
  }
  for (const auto& [name, stats] : rows) print_stats(std::cout, name, stats);
  if (!args.out_path.empty()) write_stats_csv(rows, args.out_path);
  return kExitOk;
}

struct JudgeArgs {
  std::string strategy = "rule";
  std::string mock_table_path;
  std::string endpoint;
  std::string model = "judge";
  std::string cache_dir;
  int max_in_flight = 4;
  int max_retries = 2;
  double timeout_sec = 30.0;
};

eif::Judge make_judge(const JudgeArgs& args) {
  if (args.strategy == "rule") return eif::rule_judge();
  if (args.strategy == "mock") {
    if (args.mock_table_path.empty()) {
      throw eif::ConfigError("--judge mock requires --mock-table");
    }
    return eif::mock_judge(eif::load_mock_table(args.mock_table_path));
  }
  if (args.strategy == "remote") {
    if (args.endpoint.empty()) throw eif::ConfigError("--judge remote requires --endpoint");
    eif::JudgeConfig cfg;
    cfg.endpoint_url = args.endpoint;
    cfg.model_name = args.model;
    cfg.max_in_flight = args.max_in_flight;
    cfg.max_retries = args.max_retries;
    cfg.timeout_sec = args.timeout_sec;
    if (!args.cache_dir.empty()) cfg.cache_dir = args.cache_dir;
    return eif::remote_judge(cfg);
  }
  throw eif::ConfigError("unknown judge strategy \"" + args.strategy + "\"");
}

struct EvaluateArgs {
  std::string dataset_path;
  std::string responses_path;
  std::string out_path;
  JudgeArgs judge;
};

int run_evaluate(const EvaluateArgs& args) {
  const eif::Dataset d = eif::load_dataset(args.dataset_path);
  const std::map<std::string, std::string> responses =
      eif::read_responses_jsonl(args.responses_path);
  const eif::Judge judge = make_judge(args.judge);

  std::map<std::string, bool> matched;
  for (const auto& [id, text] : responses) matched[id] = false;

  std::vector<std::pair<std::string, eif::ScoreMatrix>> scores;
  for (const eif::Instance& inst : d.instances) {
    eif::ScoreMatrix s;
    auto it = responses.find(inst.id);
    if (it == responses.end()) {
      std::cerr << "warning: no response for instance \"" << inst.id << "\"; scoring zeros\n";
      for (const eif::Instruction& ins : inst.instructions) {
        s.rows.emplace_back(ins.constraints.size(), 0);
      }
    } else {
      matched[inst.id] = true;
      try {
        s = eif::judge_instance(inst, eif::parse_response(it->second), judge);
      } catch (const eif::FormatError&) {
        for (const eif::Instruction& ins : inst.instructions) {
          s.rows.emplace_back(ins.constraints.size(), 0);
        }
      }
    }
    scores.emplace_back(inst.id, std::move(s));
  }
  for (const auto& [id, was_used] : matched) {
    if (!was_used) std::cerr << "warning: response id \"" << id << "\" matches no instance\n";
  }
  eif::write_scores_jsonl(scores, args.out_path);
  return kExitOk;
}

struct MetricsArgs {
  std::string scores_path;
  std::string out_path;
};

int run_metrics(const MetricsArgs& args) {
  const auto scores = eif::read_scores_jsonl(args.scores_path);
  if (scores.empty()) throw eif::SchemaError("scores file has no records");
  std::vector<std::pair<std::string, eif::InstanceMetrics>> rows;
  std::vector<eif::InstanceMetrics> ms;
  for (const auto& [id, matrix] : scores) {
    eif::InstanceMetrics m = eif::instance_metrics(matrix);
    rows.emplace_back(id, m);
    ms.push_back(m);
  }
  const eif::AggregateMetrics agg = eif::aggregate(ms);
  if (args.out_path.empty()) {
    eif::write_metrics_csv(rows, agg, std::cout);
  } else {
    eif::write_metrics_csv(rows, agg, args.out_path);
  }
  return kExitOk;
}

eif::SyntheticTaskSpec load_task_spec(const nlohmann::json& j) {
  eif::SyntheticTaskSpec spec;
  if (j.contains("num_instances")) spec.num_instances = j["num_instances"].get<int>();
  auto range = [&](const char* field, std::pair<int, int>& dst) {
    if (!j.contains(field)) return;
    const auto& r = j[field];
    if (!r.is_array() || r.size() != 2) {
      throw eif::SpecError(std::string(field) + " must be a [lo, hi] pair");
    }
    dst = {r[0].get<int>(), r[1].get<int>()};
  };
  range("instructions_per_instance", spec.instructions_per_instance);
  range("constraints_per_instruction", spec.constraints_per_instruction);
  if (j.contains("keywords")) spec.keywords = j["keywords"].get<std::vector<std::string>>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  eif::validate(spec);
  return spec;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eif::IoError("cannot open file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw eif::SchemaError("invalid JSON in " + path);
  return j;
}

struct GenTasksArgs {
  std::string spec_path;
  std::string out_path;
  std::string answers_path;
};

int run_gen_tasks(const GenTasksArgs& args) {
  eif::SyntheticTaskSpec spec;
  if (!args.spec_path.empty()) spec = load_task_spec(load_json_file(args.spec_path));
  const eif::Dataset d = eif::gen_tasks(spec);
  eif::save_dataset(d, args.out_path);
  if (!args.answers_path.empty()) {
    eif::write_responses_jsonl(eif::perfect_responses(spec, d), args.answers_path);
  }
  return kExitOk;
}

struct TrainArgs {
  std::string mode = "segpo";
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
};

int run_train_toy(const TrainArgs& args) {
  eif::TrainConfig cfg;
  eif::SyntheticTaskSpec spec;
  double format_bias = 3.0;
  if (!args.config_path.empty()) {
    const nlohmann::json j = load_json_file(args.config_path);
    if (j.contains("group_size")) cfg.group_size = j["group_size"].get<int>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<int>();
    if (j.contains("max_len")) cfg.max_len = j["max_len"].get<int>();
    if (j.contains("std_floor")) cfg.std_floor = j["std_floor"].get<double>();
    if (j.contains("format_bias")) format_bias = j["format_bias"].get<double>();
    if (j.contains("tasks")) spec = load_task_spec(j["tasks"]);
  }
  const auto mode = eif::parse_train_mode(args.mode);
  if (!mode) throw eif::ConfigError("unknown mode \"" + args.mode + "\"");
  cfg.mode = *mode;
  cfg.seed = args.seed;
  cfg.workers = args.workers;
  if (cfg.group_size < 2) throw eif::ConfigError("group_size must be at least 2");
  if (cfg.epsilon <= 0.0) throw eif::ConfigError("epsilon must be positive");
  if (cfg.beta < 0.0) throw eif::ConfigError("beta must be non-negative");
  if (cfg.lr <= 0.0) throw eif::ConfigError("lr must be positive");

  const eif::TaskSuite suite = eif::make_task_suite(spec, format_bias);
  const eif::TrainResult result = eif::train(cfg, suite, eif::rule_judge());

  std::filesystem::create_directories(args.out_dir);
  eif::write_training_log(result.log, args.out_dir + "/train_log.jsonl");
  eif::save_policy(result.final_params, args.out_dir + "/checkpoint.json");

  const auto& first = result.log.rows.front();
  const auto& last = result.log.rows.back();
  std::cout << "mode " << args.mode << " iterations " << cfg.iterations << "\n";
  std::cout << "mean_overall first " << eif::round4(first.mean_overall) << " last "
            << eif::round4(last.mean_overall) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EifBench-style instruction-following lab: dataset statistics, constraint "
               "judging, ILA/CLA metrics, and toy GRPO/SegPO training"};
  app.require_subcommand(1);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "dataset statistics (constraint totals, m_i histogram)");
  stats->add_option("--dataset", stats_args.dataset_path, "dataset JSONL")->required();
  stats->add_flag("--per-scenario", stats_args.per_scenario, "split by scenario");
  stats->add_option("--out", stats_args.out_path, "also write CSV here");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "judge responses into a scores file");
  evaluate->add_option("--dataset", eval_args.dataset_path, "dataset JSONL")->required();
  evaluate->add_option("--responses", eval_args.responses_path, "responses JSONL")->required();
  evaluate->add_option("--judge", eval_args.judge.strategy, "rule|mock|remote")
      ->default_val("rule");
  evaluate->add_option("--mock-table", eval_args.judge.mock_table_path, "mock verdict table JSON");
  evaluate->add_option("--endpoint", eval_args.judge.endpoint, "remote judge endpoint url");
  evaluate->add_option("--model", eval_args.judge.model, "remote judge model name");
  evaluate->add_option("--cache-dir", eval_args.judge.cache_dir, "remote verdict cache directory");
  evaluate->add_option("--max-in-flight", eval_args.judge.max_in_flight, "remote concurrency cap");
  evaluate->add_option("--max-retries", eval_args.judge.max_retries, "remote retry count");
  evaluate->add_option("--timeout", eval_args.judge.timeout_sec, "remote timeout seconds");
  evaluate->add_option("--out", eval_args.out_path, "scores JSONL output")->required();

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "ILA/CLA/full report from a scores file");
  metrics->add_option("--scores", metrics_args.scores_path, "scores JSONL")->required();
  metrics->add_option("--out", metrics_args.out_path, "report CSV (stdout when omitted)");

  GenTasksArgs gen_args;
  auto* gen = app.add_subcommand("gen-tasks", "generate a rule-checkable synthetic dataset");
  gen->add_option("--spec", gen_args.spec_path, "task spec JSON (defaults when omitted)");
  gen->add_option("--out", gen_args.out_path, "dataset JSONL output")->required();
  gen->add_option("--answers", gen_args.answers_path, "also write all-satisfying responses");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-toy", "train the toy policy with GRPO or SegPO");
  train->add_option("--mode", train_args.mode, "grpo|segpo")->required();
  train->add_option("--config", train_args.config_path, "train config JSON");
  train->add_option("--seed", train_args.seed, "training seed")->default_val(0);
  train->add_option("--out", train_args.out_dir, "output directory")->required();
  train->add_option("--workers", train_args.workers, "rollout worker threads")->default_val(1);

  try {
    app.parse(argc, argv);
    if (stats->parsed()) return run_stats(stats_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (metrics->parsed()) return run_metrics(metrics_args);
    if (gen->parsed()) return run_gen_tasks(gen_args);
    if (train->parsed()) return run_train_toy(train_args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  } catch (const eif::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::DuplicateIdError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::EmptyDatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const eif::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
