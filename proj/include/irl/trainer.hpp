#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "irl/adam.hpp"
#include "irl/config.hpp"
#include "irl/envs.hpp"
#include "irl/heads.hpp"
#include "irl/memory.hpp"
#include "irl/objectives.hpp"

namespace irl {

/// One Adam state per network.
struct Optimizers {
  net::AdamState q, f, g, mu, sigma;
  static Optimizers for_heads(const IrlHeads& heads, const TrainConfig& cfg);
};

struct StepRecord {
  double t = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd a;
  double reward = 0.0;
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  double total_reward = 0.0;
  int clipped_actions = 0;
  bool terminated = false;
};

/// Column order of the per-episode curve CSV.
inline constexpr const char* kLossNames[] = {"J_Q",     "J_Q_prime", "J_E",
                                             "J_E_prime", "J_A",     "J_A_prime",
                                             "J_Lip_p", "J_Lip_v",   "J_Range"};
inline constexpr int kLossCount = 9;

struct UpdateOutcome {
  std::vector<obj::LossReport> losses;  // kLossNames order
  int rejected = 0;                     // head updates skipped for non-finite gradients
};

struct CurveRow {
  int episode = 0;
  double total_reward = 0.0;
  double losses[kLossCount] = {};  // mean over the episode's updates
  int rejected_steps = 0;
};

struct TrainResult {
  IrlHeads heads;
  TargetSet targets;
  Optimizers optimizers;
  std::vector<CurveRow> curve;
  std::vector<std::string> events;  // "release", "refresh", "rollout", "update" per iteration
  int accepted_nonfinite = 0;       // parameter sets that became non-finite after a step
  double wall_seconds = 0.0;
};

HeadConfig head_config_for(const TrainConfig& cfg, const env::EnvSpec& spec);
obj::RangeBounds range_bounds(const env::EnvSpec& spec);

/// Rollout of one episode with the action SDE:
///   act with a_k, observe R_k and s_{k+1}, a_{k+1} = clip(a_k + mu dt + sigma dB),
///   store (s_k, a_k, R_k, s_{k+1}, a_{k+1}).
/// Heads are read-only. With drift_only, sigma is replaced by its floor.
EpisodeLog rollout_episode(const TrainConfig& cfg, const IrlHeads& heads,
                           const env::Environment& env, RngStream& rng, ReplayBuffer* buffer,
                           bool drift_only = false);

/// One gradient step per head on the weighted objective sums.
UpdateOutcome update_step(const TrainConfig& cfg, IrlHeads& heads, const TargetSet& targets,
                          Optimizers& opt, const ReplayBuffer& buffer, const env::EnvSpec& spec,
                          RngStream& rng);

/// Evaluate every objective on one batch without touching parameters.
/// The gradients returned are the weighted per-head sums update_step applies.
struct Evaluation {
  std::vector<obj::LossReport> losses;
  HeadGradients grads;
};
Evaluation evaluate_objectives(const TrainConfig& cfg, const IrlHeads& heads,
                               const TargetSet& targets, const Batch& batch,
                               const env::EnvSpec& spec);

using EpisodeCallback = std::function<void(const CurveRow&)>;

/// Outer loop: release buffer, refresh targets, rollout, update.
TrainResult train(const TrainConfig& cfg, const EpisodeCallback& on_episode = {});

struct EvalSummary {
  std::vector<double> totals;
  double mean = 0.0;
  double stddev = 0.0;
};
/// Episodes with sigma replaced by its floor.
EvalSummary evaluate_policy(const TrainConfig& cfg, const IrlHeads& heads, int episodes,
                            std::uint64_t seed);

/// Reference baseline: actions drawn uniformly in the action bounds each step.
EvalSummary evaluate_random_policy(const TrainConfig& cfg, int episodes, std::uint64_t seed);

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& curve);
std::string curve_csv_header();
void write_trajectory_csv(std::ostream& os, const EpisodeLog& log);

nlohmann::json checkpoint_json(const TrainConfig& cfg, const IrlHeads& heads,
                               const TargetSet& targets, const Optimizers& opt, int episodes);
struct Checkpoint {
  TrainConfig config;
  IrlHeads heads;
  TargetSet targets;
  Optimizers optimizers;
  int episodes = 0;
};
Checkpoint load_checkpoint(const std::string& path);
void save_checkpoint(const std::string& path, const nlohmann::json& doc);

}  // namespace irl
