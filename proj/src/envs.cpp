#include "irl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irl/errors.hpp"

namespace irl::env {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

StepResult Environment::step(const EnvState& state, const Eigen::VectorXd& action) const {
  const EnvSpec& spec = bounds();
  if (state.done()) throw StateError(spec.name + ": step called on a finished episode");
  require_shape(action.size() == spec.action_dim && state.s.size() == spec.state_dim,
                spec.name + ": action/state dimension mismatch");
  const Eigen::VectorXd u = action.cwiseMax(spec.a_min).cwiseMin(spec.a_max);
  Transition t = dynamics(state.s, u);
  t.s = t.s.cwiseMax(spec.s_min).cwiseMin(spec.s_max);
  if (!t.s.allFinite() || !std::isfinite(t.reward))
    throw NonFiniteError(spec.name + ": dynamics produced a non-finite value");
  StepResult r;
  r.next.s = std::move(t.s);
  r.next.step_index = state.step_index + 1;
  r.next.terminated = t.terminated;
  r.next.truncated = !t.terminated && r.next.step_index >= spec.max_steps;
  r.reward = t.reward;
  r.done = r.next.done();
  return r;
}

// ---- Pendulum ----

Pendulum::Pendulum() {
  using C = PendulumConstants;
  spec_ = {"pendulum", 3, 1, vec({-1.0, -1.0, -C::max_speed}), vec({1.0, 1.0, C::max_speed}),
           vec({-C::max_torque}), vec({C::max_torque}), C::dt, 200};
}

Eigen::VectorXd Pendulum::observe(double theta, double theta_dot) {
  return vec({std::cos(theta), std::sin(theta), theta_dot});
}

double Pendulum::angle(const Eigen::VectorXd& s) { return std::atan2(s[1], s[0]); }

EnvState Pendulum::reset(RngStream& rng) const {
  EnvState st;
  const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
  st.s = observe(theta, rng.uniform(-1.0, 1.0));
  return st;
}

double Pendulum::energy(const Eigen::VectorXd& s) {
  using C = PendulumConstants;
  return 0.5 * s[2] * s[2] + 1.5 * C::gravity / C::length * s[0];
}

Environment::Transition Pendulum::dynamics(const Eigen::VectorXd& s,
                                           const Eigen::VectorXd& u) const {
  using C = PendulumConstants;
  const double th = angle(s);
  const double thdot = s[2];
  const double torque = u[0];
  const double cost = th * th + 0.1 * thdot * thdot + 0.001 * torque * torque;
  double new_thdot = thdot + (1.5 * C::gravity / C::length * std::sin(th) +
                              3.0 / (C::mass * C::length * C::length) * torque) *
                                 C::dt;
  new_thdot = std::clamp(new_thdot, -C::max_speed, C::max_speed);
  return {observe(th + new_thdot * C::dt, new_thdot), -cost, false};
}

// ---- MountainCar ----

MountainCar::MountainCar() {
  using C = MountainCarConstants;
  spec_ = {"mountaincar", 2, 1,
           vec({C::min_position, -C::max_speed}), vec({C::max_position, C::max_speed}),
           vec({-1.0}), vec({1.0}), 0.05, 200};
}

EnvState MountainCar::reset(RngStream& rng) const {
  EnvState st;
  st.s = vec({rng.uniform(-0.6, -0.4), 0.0});
  return st;
}

Environment::Transition MountainCar::dynamics(const Eigen::VectorXd& s,
                                              const Eigen::VectorXd& u) const {
  using C = MountainCarConstants;
  double position = s[0];
  double velocity = s[1];
  const double force = u[0];
  velocity += force * C::power - C::hill_gravity * std::cos(3.0 * position);
  velocity = std::clamp(velocity, -C::max_speed, C::max_speed);
  position += velocity;
  position = std::clamp(position, C::min_position, C::max_position);
  if (position == C::min_position && velocity < 0.0) velocity = 0.0;
  const bool goal = position >= C::goal_position && velocity >= 0.0;
  const double reward = (goal ? C::goal_bonus : 0.0) - 0.1 * force * force;
  return {vec({position, velocity}), reward, goal};
}

// ---- CartPole ----

CartPole::CartPole(bool discrete_force) : discrete_force_(discrete_force) {
  using C = CartPoleConstants;
  const double x_lim = 2.0 * C::x_threshold;
  const double th_lim = 2.0 * C::theta_threshold;
  spec_ = {discrete_force ? "cartpole-discrete" : "cartpole", 4, 1,
           vec({-x_lim, -C::velocity_limit, -th_lim, -C::velocity_limit}),
           vec({x_lim, C::velocity_limit, th_lim, C::velocity_limit}),
           vec({-C::force_mag}), vec({C::force_mag}), C::dt, 200};
}

EnvState CartPole::reset(RngStream& rng) const {
  EnvState st;
  st.s.resize(4);
  for (int i = 0; i < 4; ++i) st.s[i] = rng.uniform(-0.05, 0.05);
  return st;
}

Environment::Transition CartPole::dynamics(const Eigen::VectorXd& s,
                                           const Eigen::VectorXd& u) const {
  using C = CartPoleConstants;
  const double force = discrete_force_ ? (u[0] > 0.0 ? C::force_mag : -C::force_mag) : u[0];
  const double x = s[0], x_dot = s[1], theta = s[2], theta_dot = s[3];
  const double total_mass = C::cart_mass + C::pole_mass;
  const double pole_mass_length = C::pole_mass * C::half_length;
  const double cos_t = std::cos(theta), sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (C::gravity * sin_t - cos_t * temp) /
      (C::half_length * (4.0 / 3.0 - C::pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;
  // semi-implicit Euler: velocities first, positions with the new velocities
  const double new_x_dot = x_dot + C::dt * x_acc;
  const double new_x = x + C::dt * new_x_dot;
  const double new_theta_dot = theta_dot + C::dt * theta_acc;
  const double new_theta = theta + C::dt * new_theta_dot;
  const bool failed = new_x < -C::x_threshold || new_x > C::x_threshold ||
                      new_theta < -C::theta_threshold || new_theta > C::theta_threshold;
  return {vec({new_x, new_x_dot, new_theta, new_theta_dot}), 1.0, failed};
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "mountaincar") return std::make_unique<MountainCar>();
  if (name == "cartpole") return std::make_unique<CartPole>(false);
  if (name == "cartpole-discrete") return std::make_unique<CartPole>(true);
  throw ConfigError("unknown environment '" + std::string(name) +
                    "' (valid: pendulum, mountaincar, cartpole, cartpole-discrete)");
}

}  // namespace irl::env
