#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace irl {

enum class SamplingMode { Uniform, Bernoulli };

/// Every tunable of a training run. Defaults follow the reference setup:
/// dt = 0.05, gamma = 0.6, 200 steps per episode, APG weights (0.1, 1).
struct TrainConfig {
  std::string env = "pendulum";
  double dt = 0.05;
  double gamma = 0.6;
  int steps_per_episode = 200;
  int max_episodes = 300;
  int batch_size = 64;
  int updates_per_episode = 20;
  int buffer_capacity = 100000;
  bool retain_buffer = false;
  SamplingMode sampling = SamplingMode::Uniform;
  bool bernoulli_gates_storage = false;

  double lr_q = 1e-3;
  double lr_ese = 1e-3;
  double lr_apg = 1e-3;

  double w_jq = 1.0;
  double w_jq_prime = 1.0;
  double w_je = 1.0;
  double w_je_prime = 1.0;
  double w_ja = 0.1;
  double w_ja_prime = 1.0;
  double lambda1 = 0.01;
  double lambda2 = 0.01;
  double lambda_range = 0.01;
  double d1 = 10.0;
  double d2 = 10.0;

  int hidden_layers = 2;
  int hidden_units = 64;
  std::string activation = "sigmoid";
  double mu_max = 0.0;  // <= 0 selects 2 * action_range / dt * 0.05
  double initial_action = 0.0;

  std::uint64_t seed = 0;
  int eval_episodes = 10;

  /// Throws ConfigError listing all valid keys if `key` is unknown or the
  /// value does not parse.
  void set(std::string_view key, std::string_view value);
  /// Throws ConfigError on out-of-range values.
  void validate() const;

  /// Canonical "key = value" lines in a fixed key order.
  std::string to_text() const;
  std::map<std::string, std::string> to_map() const;
  std::uint64_t hash() const;

  /// Applies "key = value" lines ('#' starts a comment) on top of the current
  /// values; keys not mentioned keep their value.
  void apply_text(std::string_view text);
  void apply_file(const std::string& path);

  static const std::vector<std::string>& keys();
  static TrainConfig from_text(std::string_view text);
  static TrainConfig from_file(const std::string& path);
};

}  // namespace irl
