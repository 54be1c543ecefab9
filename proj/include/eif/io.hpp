#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eif/errors.hpp"
#include "eif/metrics.hpp"
#include "eif/optimizer.hpp"

namespace eif {

// presentation-layer rounding; metrics stay full precision internally
inline std::string round4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// ---- scores file: JSONL {"instance_id": str, "scores": [[0|1,...],...]} ----

inline void write_scores_jsonl(const std::vector<std::pair<std::string, ScoreMatrix>>& scores,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scores file: " + path);
  for (const auto& [id, matrix] : scores) {
    nlohmann::ordered_json j;
    j["instance_id"] = id;
    j["scores"] = matrix.rows;
    out << j.dump() << '\n';
  }
}

inline std::vector<std::pair<std::string, ScoreMatrix>> read_scores_jsonl(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores file: " + path);
  std::vector<std::pair<std::string, ScoreMatrix>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
    if (!j.contains("instance_id") || !j["instance_id"].is_string()) {
      throw SchemaError("missing string field \"instance_id\"", line_no);
    }
    if (!j.contains("scores") || !j["scores"].is_array()) {
      throw SchemaError("missing array field \"scores\"", line_no);
    }
    ScoreMatrix m;
    for (const auto& row : j["scores"]) {
      if (!row.is_array()) throw SchemaError("scores rows must be arrays", line_no);
      std::vector<int> r;
      for (const auto& v : row) {
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          throw SchemaError("scores entries must be 0 or 1", line_no);
        }
        r.push_back(v.get<int>());
      }
      m.rows.push_back(std::move(r));
    }
    out.emplace_back(j["instance_id"].get<std::string>(), std::move(m));
  }
  return out;
}

// ---- responses file: JSONL {"instance_id": str, "response": str} ----

inline std::map<std::string, std::string> read_responses_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open responses file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
    if (!j.contains("instance_id") || !j["instance_id"].is_string() ||
        !j.contains("response") || !j["response"].is_string()) {
      throw SchemaError("responses need string fields \"instance_id\" and \"response\"", line_no);
    }
    out[j["instance_id"].get<std::string>()] = j["response"].get<std::string>();
  }
  return out;
}

inline void write_responses_jsonl(const std::map<std::string, std::string>& responses,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write responses file: " + path);
  for (const auto& [id, response] : responses) {
    nlohmann::ordered_json j;
    j["instance_id"] = id;
    j["response"] = response;
    out << j.dump() << '\n';
  }
}

// ---- metrics report: CSV with a trailing AGGREGATE row ----

inline void write_metrics_csv(const std::vector<std::pair<std::string, InstanceMetrics>>& rows,
                              const AggregateMetrics& agg, std::ostream& out) {
  out << "instance_id,ila,cla,full\n";
  for (const auto& [id, m] : rows) {
    out << id << ',' << round4(m.ila) << ',' << round4(m.cla) << ',' << m.full << '\n';
  }
  out << "AGGREGATE," << round4(agg.ila) << ',' << round4(agg.cla) << ',' << round4(agg.full_rate)
      << '\n';
}

inline void write_metrics_csv(const std::vector<std::pair<std::string, InstanceMetrics>>& rows,
                              const AggregateMetrics& agg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report file: " + path);
  write_metrics_csv(rows, agg, out);
}

// ---- training log: JSONL, one row per iteration ----

inline void write_training_log(const TrainingLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write training log: " + path);
  for (const TrainLogRow& row : log.rows) {
    nlohmann::ordered_json j;
    j["iter"] = row.iter;
    j["mean_overall"] = row.mean_overall;
    j["ila"] = row.ila;
    j["cla"] = row.cla;
    j["format_rate"] = row.format_rate;
    j["surrogate"] = row.surrogate;
    out << j.dump() << '\n';
  }
}

inline TrainingLog read_training_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training log: " + path);
  TrainingLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
    TrainLogRow row;
    row.iter = j.at("iter").get<int>();
    row.mean_overall = j.at("mean_overall").get<double>();
    row.ila = j.at("ila").get<double>();
    row.cla = j.at("cla").get<double>();
    row.format_rate = j.at("format_rate").get<double>();
    row.surrogate = j.at("surrogate").get<double>();
    log.rows.push_back(row);
  }
  return log;
}

}  // namespace eif
