#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "irl/tensor_net.hpp"

namespace irl::net {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment buffers track the parameter set they were created for.
struct AdamState {
  AdamConfig config;
  ParamSet first_moment;
  ParamSet second_moment;
  std::uint64_t step_count = 0;

  static AdamState for_params(const ParamSet& params, AdamConfig config = {});
};

/// One bias-corrected Adam step. Throws NonFiniteError (and leaves both
/// params and state untouched) if any gradient component is NaN or infinite.
void adam_update(ParamSet& params, const ParamSet& grads, AdamState& state);

void to_json(nlohmann::json& j, const AdamState& s);
void from_json(const nlohmann::json& j, AdamState& s);

}  // namespace irl::net
