#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eif/dataset.hpp"
#include "eif/errors.hpp"
#include "eif/policy.hpp"
#include "eif/reward.hpp"
#include "eif/segment.hpp"

namespace eif {

enum class TrainMode { grpo, segpo };

inline std::optional<TrainMode> parse_train_mode(std::string_view s) {
  if (s == "grpo") return TrainMode::grpo;
  if (s == "segpo") return TrainMode::segpo;
  return std::nullopt;
}

struct TrainConfig {
  TrainMode mode = TrainMode::segpo;
  int group_size = 8;      // G
  double epsilon = 0.2;    // clip radius
  double beta = 0.01;      // KL weight
  double lr = 0.05;
  int iterations = 200;
  int max_len = 32;
  std::uint64_t seed = 0;
  double std_floor = 1e-8;
  int workers = 1;
};

// One group of G sampled trajectories for a single query, with overall
// rewards r^o_i, per-instruction segment rewards r^phi_{i,j} (missing
// segments contribute 0), and per-token attributions I^i_t.
struct GroupRollout {
  std::vector<Trajectory> trajectories;
  std::vector<double> overall_rewards;                     // length G
  std::vector<std::vector<double>> segment_rewards;        // G x M, entries 0/1
  std::vector<std::vector<std::optional<int>>> attributions;
};

// per-trajectory, per-token advantages A_{i,t}
using AdvantageField = std::vector<std::vector<double>>;

// (r - mean) / population std; all zeros when the group is (near) constant
inline std::vector<double> group_normalize(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) throw TooFewError("group_normalize requires at least 2 rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (std < std_floor) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

// GRPO: one normalized group reward per trajectory, broadcast to its tokens
inline AdvantageField grpo_advantages(const GroupRollout& roll, const TrainConfig& cfg) {
  const std::vector<double> a = group_normalize(roll.overall_rewards, cfg.std_floor);
  AdvantageField field(roll.trajectories.size());
  for (std::size_t i = 0; i < roll.trajectories.size(); ++i) {
    field[i].assign(roll.trajectories[i].tokens.size(), a[i]);
  }
  return field;
}

// SegPO: A_{i,t} = A^o_{i,t} + A^phi_{i,t}. The segment component normalizes
// each instruction's reward column across the group; unattributed tokens get
// the global component only.
inline AdvantageField segpo_advantages(const GroupRollout& roll, const TrainConfig& cfg) {
  const std::vector<double> global = group_normalize(roll.overall_rewards, cfg.std_floor);
  const std::size_t group = roll.trajectories.size();
  const std::size_t m = roll.segment_rewards.empty() ? 0 : roll.segment_rewards.front().size();

  std::vector<std::vector<double>> segment(group, std::vector<double>(m, 0.0));
  std::vector<double> column(group);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < group; ++i) column[i] = roll.segment_rewards[i][j];
    const std::vector<double> a = group_normalize(column, cfg.std_floor);
    for (std::size_t i = 0; i < group; ++i) segment[i][j] = a[i];
  }

  AdvantageField field(group);
  for (std::size_t i = 0; i < group; ++i) {
    const auto& attr = roll.attributions[i];
    field[i].resize(roll.trajectories[i].tokens.size());
    for (std::size_t t = 0; t < field[i].size(); ++t) {
      double a = global[i];
      if (t < attr.size() && attr[t].has_value() &&
          static_cast<std::size_t>(*attr[t]) < m) {
        a += segment[i][*attr[t]];
      }
      field[i][t] = a;
    }
  }
  return field;
}

// Per-token unbiased KL estimator rho - ln(rho) - 1 with
// rho = pi_ref / pi_theta. Non-negative, zero iff the policies agree.
inline double kl_estimate(double logp_theta, double logp_ref) {
  const double d = logp_ref - logp_theta;
  if (std::abs(d) > 500.0) {
    throw OverflowGuardError("kl_estimate log ratio out of range: " + std::to_string(d));
  }
  return std::exp(d) - d - 1.0;
}

namespace detail {

// per-token log probs of a trajectory's tokens under the given params
inline std::vector<double> per_token_logprobs(const PolicyParams& p, const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.tokens.size());
  int context = kBosContext;
  for (int token : traj.tokens) {
    const std::vector<double> probs = token_distribution(p, traj.query_id, context);
    out.push_back(std::log(probs[token]));
    context = context_after(token);
  }
  return out;
}

inline void require_adv_shape(const GroupRollout& roll, const AdvantageField& adv) {
  if (adv.size() != roll.trajectories.size()) {
    throw ShapeMismatchError("advantage field trajectory count mismatch");
  }
  for (std::size_t i = 0; i < adv.size(); ++i) {
    if (adv[i].size() != roll.trajectories[i].tokens.size()) {
      throw ShapeMismatchError("advantage field token count mismatch");
    }
  }
}

}  // namespace detail

// Clipped surrogate objective with per-token KL penalty:
//   (1/G) sum_i (1/|y_i|) sum_t { min(rho_t A_t, clip(rho_t, 1-eps, 1+eps) A_t)
//                                 - beta * (rho_ref - ln rho_ref - 1) }
// where rho_t = pi_new / pi_old at the sampled token.
inline double surrogate_value(const PolicyParams& next, const PolicyParams& old,
                              const PolicyParams& ref, const GroupRollout& roll,
                              const AdvantageField& adv, const TrainConfig& cfg) {
  detail::require_adv_shape(roll, adv);
  double value = 0.0;
  for (std::size_t i = 0; i < roll.trajectories.size(); ++i) {
    const Trajectory& traj = roll.trajectories[i];
    if (traj.tokens.empty()) continue;
    const std::vector<double> lp_new = detail::per_token_logprobs(next, traj);
    const std::vector<double> lp_old = detail::per_token_logprobs(old, traj);
    const std::vector<double> lp_ref = detail::per_token_logprobs(ref, traj);
    double sum = 0.0;
    for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
      const double rho = std::exp(lp_new[t] - lp_old[t]);
      const double clipped = std::clamp(rho, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
      const double a = adv[i][t];
      sum += std::min(rho * a, clipped * a);
      if (cfg.beta != 0.0) sum -= cfg.beta * kl_estimate(lp_new[t], lp_ref[t]);
    }
    value += sum / static_cast<double>(traj.tokens.size());
  }
  return value / static_cast<double>(roll.trajectories.size());
}

// Exact analytic gradient of surrogate_value with respect to `next`. The
// clip min contributes through an indicator: when the clipped constant
// branch is selected the policy term has zero gradient (ties take the
// unclipped branch). The KL term contributes (1 - rho_ref) grad logpi.
inline PolicyParams surrogate_gradient(const PolicyParams& next, const PolicyParams& old,
                                       const PolicyParams& ref, const GroupRollout& roll,
                                       const AdvantageField& adv, const TrainConfig& cfg) {
  detail::require_adv_shape(roll, adv);
  PolicyParams grad = PolicyParams::zeros(next.vocab_size);
  const double inv_group = 1.0 / static_cast<double>(roll.trajectories.size());
  for (std::size_t i = 0; i < roll.trajectories.size(); ++i) {
    const Trajectory& traj = roll.trajectories[i];
    if (traj.tokens.empty()) continue;
    auto& offset_grad = grad.query_offsets[traj.query_id];
    if (offset_grad.empty()) offset_grad.assign(next.vocab_size, 0.0);
    const std::vector<double> lp_old = detail::per_token_logprobs(old, traj);
    const std::vector<double> lp_ref = detail::per_token_logprobs(ref, traj);
    const double inv_len = 1.0 / static_cast<double>(traj.tokens.size());
    int context = kBosContext;
    for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
      const int token = traj.tokens[t];
      const std::vector<double> probs = token_distribution(next, traj.query_id, context);
      const double lp_new = std::log(probs[token]);
      const double rho = std::exp(lp_new - lp_old[t]);
      const double clipped = std::clamp(rho, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
      const double a = adv[i][t];
      double coeff = 0.0;
      if (rho * a <= clipped * a) coeff += rho * a;  // unclipped branch active
      if (cfg.beta != 0.0) {
        const double rho_ref = std::exp(lp_ref[t] - lp_new);
        coeff -= cfg.beta * (1.0 - rho_ref);
      }
      const double scale = coeff * inv_len * inv_group;
      if (scale != 0.0) {
        for (int v = 0; v < next.vocab_size; ++v) {
          const double d = scale * ((v == token ? 1.0 : 0.0) - probs[v]);
          grad.logits[context][v] += d;
          offset_grad[v] += d;
        }
      }
      context = context_after(token);
    }
  }
  return grad;
}

// ---- training loop ----

// Synthetic tasks plus the vocabulary and initial policy they are wired to;
// query id i maps to tasks.instances[i].
struct TaskSuite {
  Dataset tasks;
  Vocabulary vocab;
  PolicyParams init_policy;
};

struct TrainLogRow {
  int iter = 0;
  double mean_overall = 0.0;
  double ila = 0.0;
  double cla = 0.0;
  double format_rate = 0.0;
  double surrogate = 0.0;
};

struct TrainingLog {
  std::vector<TrainLogRow> rows;
};

struct TrainResult {
  TrainingLog log;
  PolicyParams final_params;
};

namespace detail {

inline std::string detokenize(const Trajectory& traj, const Vocabulary& vocab) {
  std::string text;
  for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
    if (traj.tokens[t] == vocab.end_id) break;
    if (!text.empty()) text += ' ';
    text += vocab.symbol(traj.tokens[t]);
  }
  return text;
}

inline ScoreMatrix zero_scores(const Instance& inst) {
  ScoreMatrix s;
  s.rows.reserve(inst.instructions.size());
  for (const Instruction& ins : inst.instructions) {
    s.rows.emplace_back(ins.constraints.size(), 0);
  }
  return s;
}

struct JudgedRollout {
  GroupRollout roll;
  double sum_overall = 0.0;
  double sum_ila = 0.0;
  double sum_cla = 0.0;
  int format_hits = 0;
};

// Sample, parse, judge, and attribute one query's group.
inline JudgedRollout rollout_query(const PolicyParams& policy, const TaskSuite& suite,
                                   const Judge& judge, const TrainConfig& cfg, int query,
                                   std::uint64_t seed) {
  const Instance& inst = suite.tasks.instances[query];
  JudgedRollout out;
  out.roll.trajectories =
      sample_group(policy, query, cfg.group_size, cfg.max_len, seed, suite.vocab.end_id);
  const std::size_t m = inst.instructions.size();
  for (const Trajectory& traj : out.roll.trajectories) {
    const std::string text = detokenize(traj, suite.vocab);
    ScoreMatrix scores;
    int format = 0;
    try {
      SegmentedResponse resp = parse_response(text);
      format = 1;
      scores = judge_instance(inst, resp, judge);
    } catch (const FormatError&) {
      scores = zero_scores(inst);
    }
    const RewardBreakdown b = overall_reward(scores, format);
    out.roll.overall_rewards.push_back(b.overall);
    std::vector<double> seg(m, 0.0);
    for (std::size_t j = 0; j < m && j < b.per_instruction.size(); ++j) {
      seg[j] = b.per_instruction[j];
    }
    out.roll.segment_rewards.push_back(std::move(seg));

    std::vector<std::string> symbols;
    symbols.reserve(traj.tokens.size());
    for (int token : traj.tokens) symbols.push_back(suite.vocab.symbol(token));
    out.roll.attributions.push_back(attribute_tokens(symbols));

    out.sum_overall += b.overall;
    out.sum_ila += b.ila;
    out.sum_cla += b.cla;
    out.format_hits += format;
  }
  return out;
}

}  // namespace detail

// Gradient-ascent loop over the task suite. Each iteration samples a group
// per query from pi_old, judges it, builds advantages per cfg.mode, and takes
// one averaged ascent step; pi_old is refreshed every iteration and pi_ref
// stays frozen at the initial parameters. Row 0 logs the initial policy;
// every subsequent row logs the rollout that produced that iteration's step.
// Deterministic given cfg.seed for any worker count.
inline TrainResult train(const TrainConfig& cfg, const TaskSuite& suite, const Judge& judge) {
  if (cfg.iterations < 0) throw ConfigError("iterations must be non-negative");
  if (suite.tasks.instances.empty()) throw ConfigError("task suite has no instances");
  const int queries = static_cast<int>(suite.tasks.instances.size());

  PolicyParams params = suite.init_policy;
  const PolicyParams ref = suite.init_policy;
  TrainingLog log;

  for (int iter = 0; iter <= cfg.iterations; ++iter) {
    const PolicyParams old = params;

    std::vector<detail::JudgedRollout> judged(queries);
    const int workers = std::max(1, std::min(cfg.workers, queries));
    if (workers == 1) {
      for (int q = 0; q < queries; ++q) {
        judged[q] = detail::rollout_query(
            old, suite, judge, cfg, q,
            detail::mix64(detail::mix64(cfg.seed, static_cast<std::uint64_t>(iter)),
                          static_cast<std::uint64_t>(q)));
      }
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next_query{0};
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          while (true) {
            const int q = next_query.fetch_add(1);
            if (q >= queries) return;
            judged[q] = detail::rollout_query(
                old, suite, judge, cfg, q,
                detail::mix64(detail::mix64(cfg.seed, static_cast<std::uint64_t>(iter)),
                              static_cast<std::uint64_t>(q)));
          }
        });
      }
      for (auto& th : pool) th.join();
    }

    TrainLogRow row;
    row.iter = iter;
    const double total = static_cast<double>(queries) * cfg.group_size;
    for (const auto& jr : judged) {
      row.mean_overall += jr.sum_overall;
      row.ila += jr.sum_ila;
      row.cla += jr.sum_cla;
      row.format_rate += jr.format_hits;
    }
    row.mean_overall /= total;
    row.ila /= total;
    row.cla /= total;
    row.format_rate /= total;

    std::vector<AdvantageField> advantages(queries);
    for (int q = 0; q < queries; ++q) {
      advantages[q] = cfg.mode == TrainMode::grpo ? grpo_advantages(judged[q].roll, cfg)
                                                  : segpo_advantages(judged[q].roll, cfg);
    }

    if (iter < cfg.iterations) {
      PolicyParams grad = PolicyParams::zeros(params.vocab_size);
      for (int q = 0; q < queries; ++q) {
        axpy(1.0 / queries,
             surrogate_gradient(params, old, ref, judged[q].roll, advantages[q], cfg), grad);
      }
      axpy(cfg.lr, grad, params);
    }

    // achieved surrogate on this iteration's rollout (0-ish for the final
    // row, where no step is taken and all ratios are 1)
    double surrogate = 0.0;
    for (int q = 0; q < queries; ++q) {
      surrogate += surrogate_value(params, old, ref, judged[q].roll, advantages[q], cfg);
    }
    row.surrogate = surrogate / queries;
    log.rows.push_back(row);
  }
  return TrainResult{std::move(log), std::move(params)};
}

}  // namespace eif
