#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "eif/errors.hpp"

namespace eif {

// Client for a chat-completion-style judge endpoint returning binary
// YES/NO verdicts. Verdicts are cached on disk keyed by a stable hash of
// (instruction, constraint, answer), so re-runs are free of network calls.

struct JudgeConfig {
  std::string endpoint_url;  // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string model_name = "judge";
  std::string api_key_env = "EIF_JUDGE_API_KEY";
  int max_in_flight = 4;
  int max_retries = 2;
  double timeout_sec = 30.0;
  std::optional<std::filesystem::path> cache_dir;
  int retry_backoff_ms = 100;  // doubled per retry
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

struct VerdictRequest {
  std::string instruction_text;
  std::string constraint_text;
  std::string answer_text;

  // stable across runs for identical inputs
  std::string key() const {
    std::uint64_t h = detail::fnv1a64(instruction_text);
    h = detail::fnv1a64("\x1f", h);
    h = detail::fnv1a64(constraint_text, h);
    h = detail::fnv1a64("\x1f", h);
    h = detail::fnv1a64(answer_text, h);
    return detail::hex64(h);
  }
};

inline std::string render_judge_prompt(const VerdictRequest& req) {
  std::string p;
  p += "You are verifying constraint satisfaction.\n";
  p += "Instruction:\n" + req.instruction_text + "\n\n";
  p += "Constraint:\n" + req.constraint_text + "\n\n";
  p += "Answer:\n" + req.answer_text + "\n\n";
  p += "Does the answer satisfy the constraint? Reply with a single word: YES or NO.";
  return p;
}

namespace detail {

// first whole word equal to yes/no, case-insensitive
inline std::optional<int> parse_yes_no(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    while (i < reply.size() && !std::isalpha(static_cast<unsigned char>(reply[i]))) ++i;
    std::size_t start = i;
    while (i < reply.size() && std::isalpha(static_cast<unsigned char>(reply[i]))) ++i;
    std::string word;
    for (std::size_t k = start; k < i; ++k) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(reply[k])));
    }
    if (word == "yes") return 1;
    if (word == "no") return 0;
  }
  return std::nullopt;
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("judge endpoint url lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::optional<int> read_cached(const JudgeConfig& cfg, const std::string& key) {
  if (!cfg.cache_dir) return std::nullopt;
  std::ifstream in(*cfg.cache_dir / key);
  if (!in) return std::nullopt;
  char c = 0;
  in >> c;
  if (c == '0') return 0;
  if (c == '1') return 1;
  return std::nullopt;
}

// write-temp-then-rename so concurrent readers never see partial files
inline void write_cached(const JudgeConfig& cfg, const std::string& key, int verdict) {
  if (!cfg.cache_dir) return;
  std::filesystem::create_directories(*cfg.cache_dir);
  const std::filesystem::path final_path = *cfg.cache_dir / key;
  const std::filesystem::path tmp_path = *cfg.cache_dir / (key + ".tmp");
  {
    std::ofstream out(tmp_path);
    out << (verdict ? '1' : '0');
  }
  std::filesystem::rename(tmp_path, final_path);
}

}  // namespace detail

// Single judged verdict. Checks the cache first; otherwise sends the fixed
// binary-verdict prompt at temperature 0 and parses the first YES/NO.
inline int verdict(const VerdictRequest& req, const JudgeConfig& cfg) {
  const std::string key = req.key();
  if (auto cached = detail::read_cached(cfg, key)) return *cached;

  const char* api_key = std::getenv(cfg.api_key_env.c_str());
  if (api_key == nullptr || *api_key == '\0') {
    throw AuthError("judge api key not set in environment variable " + cfg.api_key_env);
  }

  const auto url = detail::split_url(cfg.endpoint_url);
  nlohmann::json body = {
      {"model", cfg.model_name},
      {"messages", {{{"role", "user"}, {"content", render_judge_prompt(req)}}}},
      {"temperature", 0},
  };
  const std::string payload = body.dump();

  std::string reply;
  int backoff_ms = cfg.retry_backoff_ms;
  bool got_reply = false;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_sec));
    client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_sec));
    client.set_bearer_token_auth(api_key);
    auto res = client.Post(url.path, payload, "application/json");
    if (res && res->status == 200) {
      reply = res->body;
      got_reply = true;
      break;
    }
  }
  if (!got_reply) {
    throw TransportError("judge endpoint unreachable after " +
                         std::to_string(cfg.max_retries + 1) + " attempts: " + cfg.endpoint_url);
  }

  nlohmann::json parsed = nlohmann::json::parse(reply, nullptr, false);
  if (parsed.is_discarded()) throw ParseError("judge reply is not JSON");
  std::string content;
  try {
    content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("judge reply lacks choices[0].message.content");
  }
  auto value = detail::parse_yes_no(content);
  if (!value) throw ParseError("judge reply contains neither YES nor NO: " + content);

  detail::write_cached(cfg, key, *value);
  return *value;
}

// Batch judging with at most max_in_flight requests outstanding. Results
// are returned in request order; duplicate requests are coalesced through
// the cache key. Per-request failures are aggregated by index.
inline std::vector<int> verdict_batch(const std::vector<VerdictRequest>& reqs,
                                      const JudgeConfig& cfg) {
  std::vector<int> results(reqs.size(), 0);
  if (reqs.empty()) return results;

  // coalesce duplicates: first occurrence owns the network call
  std::vector<std::size_t> owner(reqs.size());
  {
    std::map<std::string, std::size_t> first_by_key;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      auto [it, inserted] = first_by_key.emplace(reqs[i].key(), i);
      owner[i] = it->second;
    }
  }

  std::vector<std::string> failures(reqs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= reqs.size()) return;
      if (owner[i] != i) continue;  // resolved from the owner below
      try {
        results[i] = verdict(reqs[i], cfg);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(cfg.max_in_flight, static_cast<int>(reqs.size())));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::string aggregated;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    if (!failures[owner[i]].empty()) {
      if (!aggregated.empty()) aggregated += "; ";
      aggregated += "request " + std::to_string(i) + ": " + failures[owner[i]];
    } else {
      results[i] = results[owner[i]];
    }
  }
  if (!aggregated.empty()) throw JudgeUnavailableError(aggregated);
  return results;
}

}  // namespace eif
