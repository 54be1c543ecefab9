#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "eif/errors.hpp"
#include "eif/segment.hpp"

namespace eif {

// Order-1 autoregressive softmax policy over a small vocabulary: the next
// token is conditioned on the previous token only (context 0 is
// begin-of-sequence, context 1+t follows token t). A per-query offset vector
// lets distinct prompts induce distinct distributions.

struct Vocabulary {
  std::vector<std::string> symbols;
  int end_id = -1;

  static Vocabulary from_symbols(std::vector<std::string> symbols) {
    Vocabulary v;
    v.symbols = std::move(symbols);
    if (v.symbols.size() < 3) throw ConfigError("vocabulary needs at least 3 symbols");
    for (std::size_t i = 0; i < v.symbols.size(); ++i) {
      if (v.symbols[i] == "END") {
        if (v.end_id >= 0) throw ConfigError("vocabulary has more than one END token");
        v.end_id = static_cast<int>(i);
      }
      v.index_[v.symbols[i]] = static_cast<int>(i);
    }
    if (v.end_id < 0) throw ConfigError("vocabulary lacks the END token");
    if (v.index_.size() != v.symbols.size()) throw ConfigError("vocabulary symbols must be distinct");
    return v;
  }

  int size() const { return static_cast<int>(symbols.size()); }
  const std::string& symbol(int id) const { return symbols.at(id); }
  int id_of(const std::string& symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) throw IndexError("symbol not in vocabulary: " + symbol);
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> index_;
};

struct PolicyParams {
  int vocab_size = 0;
  std::vector<std::vector<double>> logits;        // [V+1][V], row 0 = BOS
  std::map<int, std::vector<double>> query_offsets;  // query id -> length-V vector

  static PolicyParams zeros(int vocab_size) {
    PolicyParams p;
    p.vocab_size = vocab_size;
    p.logits.assign(vocab_size + 1, std::vector<double>(vocab_size, 0.0));
    return p;
  }

  int num_contexts() const { return static_cast<int>(logits.size()); }
};

// y += a * x over every parameter present in x
inline void axpy(double a, const PolicyParams& x, PolicyParams& y) {
  for (std::size_t c = 0; c < x.logits.size(); ++c) {
    for (std::size_t v = 0; v < x.logits[c].size(); ++v) {
      y.logits[c][v] += a * x.logits[c][v];
    }
  }
  for (const auto& [id, offs] : x.query_offsets) {
    auto& dst = y.query_offsets[id];
    if (dst.empty()) dst.assign(offs.size(), 0.0);
    for (std::size_t v = 0; v < offs.size(); ++v) dst[v] += a * offs[v];
  }
}

// softmax(logits[context] + query_offset), computed in log-space with
// max-subtraction
inline std::vector<double> token_distribution(const PolicyParams& p, int query_id, int context) {
  if (context < 0 || context >= p.num_contexts()) {
    throw IndexError("context " + std::to_string(context) + " out of range");
  }
  std::vector<double> z = p.logits[context];
  if (auto it = p.query_offsets.find(query_id); it != p.query_offsets.end()) {
    for (std::size_t v = 0; v < z.size(); ++v) z[v] += it->second[v];
  }
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

struct Trajectory {
  int query_id = 0;
  std::vector<int> tokens;                 // ends with END unless cut at max_len
  std::vector<double> logprob_per_token;   // aligned with tokens
};

inline int context_after(int token) { return token + 1; }
inline constexpr int kBosContext = 0;

namespace detail {

// uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution
inline double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int sample_categorical(const std::vector<double>& probs, std::mt19937_64& rng) {
  const double u = canonical_double(rng);
  double acc = 0.0;
  for (std::size_t v = 0; v + 1 < probs.size(); ++v) {
    acc += probs[v];
    if (u < acc) return static_cast<int>(v);
  }
  return static_cast<int>(probs.size()) - 1;
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// G i.i.d. ancestral samples from one query; deterministic given the seed.
// Trajectories stop when end_token is emitted or max_len is reached.
inline std::vector<Trajectory> sample_group(const PolicyParams& p, int query_id, int group_size,
                                            int max_len, std::uint64_t seed, int end_token) {
  if (group_size < 2) throw ConfigError("group size must be at least 2");
  if (max_len < 1) throw ConfigError("max_len must be at least 1");
  if (end_token < 0 || end_token >= p.vocab_size) throw IndexError("end token id out of range");
  std::mt19937_64 rng(seed);
  std::vector<Trajectory> group;
  group.reserve(group_size);
  for (int g = 0; g < group_size; ++g) {
    Trajectory traj;
    traj.query_id = query_id;
    int context = kBosContext;
    for (int t = 0; t < max_len; ++t) {
      const std::vector<double> probs = token_distribution(p, query_id, context);
      const int token = detail::sample_categorical(probs, rng);
      traj.tokens.push_back(token);
      traj.logprob_per_token.push_back(std::log(probs[token]));
      context = context_after(token);
      if (token == end_token) break;
    }
    group.push_back(std::move(traj));
  }
  return group;
}

// logprob of a trajectory under p, recomputed from scratch
inline double logprob(const PolicyParams& p, const Trajectory& traj) {
  double total = 0.0;
  int context = kBosContext;
  for (int token : traj.tokens) {
    if (token < 0 || token >= p.vocab_size) throw IndexError("token id out of range");
    const std::vector<double> probs = token_distribution(p, traj.query_id, context);
    total += std::log(probs[token]);
    context = context_after(token);
  }
  return total;
}

// exact analytic gradient of logprob: indicator minus probability at every
// visited context, plus the same contribution on the query offset
inline PolicyParams grad_logprob(const PolicyParams& p, const Trajectory& traj) {
  PolicyParams g = PolicyParams::zeros(p.vocab_size);
  auto& offset_grad = g.query_offsets[traj.query_id];
  offset_grad.assign(p.vocab_size, 0.0);
  int context = kBosContext;
  for (int token : traj.tokens) {
    if (token < 0 || token >= p.vocab_size) throw IndexError("token id out of range");
    const std::vector<double> probs = token_distribution(p, traj.query_id, context);
    for (int v = 0; v < p.vocab_size; ++v) {
      const double d = (v == token ? 1.0 : 0.0) - probs[v];
      g.logits[context][v] += d;
      offset_grad[v] += d;
    }
    context = context_after(token);
  }
  return g;
}

// ---- checkpoint io ----

inline void save_policy(const PolicyParams& p, const std::string& path) {
  nlohmann::ordered_json j;
  j["V"] = p.vocab_size;
  j["C"] = p.num_contexts();
  j["logits"] = p.logits;
  nlohmann::ordered_json offsets = nlohmann::ordered_json::object();
  for (const auto& [id, vec] : p.query_offsets) offsets[std::to_string(id)] = vec;
  j["query_offsets"] = offsets;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write policy checkpoint: " + path);
  out << j.dump(2) << '\n';
}

inline PolicyParams load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy checkpoint: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError("policy checkpoint is not valid JSON");
  PolicyParams p;
  p.vocab_size = j.at("V").get<int>();
  p.logits = j.at("logits").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(p.logits.size()) != j.at("C").get<int>()) {
    throw SchemaError("policy checkpoint context count does not match logits");
  }
  for (const auto& [key, vec] : j.at("query_offsets").items()) {
    p.query_offsets[std::stoi(key)] = vec.get<std::vector<double>>();
  }
  return p;
}

}  // namespace eif
