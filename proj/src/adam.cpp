#include "irl/adam.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "irl/errors.hpp"

namespace irl::net {

AdamState AdamState::for_params(const ParamSet& params, AdamConfig config) {
  for (double v : {config.learning_rate, config.beta1, config.beta2, config.epsilon})
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("AdamConfig: invalid hyperparameter");
  AdamState s;
  s.config = config;
  s.first_moment = params;
  s.first_moment.set_zero();
  s.second_moment = s.first_moment;
  return s;
}

void adam_update(ParamSet& params, const ParamSet& grads, AdamState& state) {
  require_shape(params.same_shape(grads) && params.same_shape(state.first_moment) &&
                    params.same_shape(state.second_moment),
                "adam_update: parameter, gradient and moment shapes differ");
  if (!grads.all_finite()) throw NonFiniteError("adam_update: non-finite gradient component");

  const auto& c = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);

  auto step = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseAbs2();
    p.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    step(params.layers[l].weight, grads.layers[l].weight, state.first_moment.layers[l].weight,
         state.second_moment.layers[l].weight);
    step(params.layers[l].bias, grads.layers[l].bias, state.first_moment.layers[l].bias,
         state.second_moment.layers[l].bias);
  }
}

void to_json(nlohmann::json& j, const AdamState& s) {
  j = {{"learning_rate", s.config.learning_rate},
       {"beta1", s.config.beta1},
       {"beta2", s.config.beta2},
       {"epsilon", s.config.epsilon},
       {"step_count", s.step_count},
       {"first_moment", s.first_moment},
       {"second_moment", s.second_moment}};
}

void from_json(const nlohmann::json& j, AdamState& s) {
  s.config.learning_rate = j.at("learning_rate").get<double>();
  s.config.beta1 = j.at("beta1").get<double>();
  s.config.beta2 = j.at("beta2").get<double>();
  s.config.epsilon = j.at("epsilon").get<double>();
  s.step_count = j.at("step_count").get<std::uint64_t>();
  s.first_moment = j.at("first_moment").get<ParamSet>();
  s.second_moment = j.at("second_moment").get<ParamSet>();
}

}  // namespace irl::net
