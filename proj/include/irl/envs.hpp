#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "irl/rng.hpp"

namespace irl::env {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  Eigen::VectorXd s_min, s_max, a_min, a_max;
  double dt = 0.05;
  int max_steps = 200;
};

struct EnvState {
  Eigen::VectorXd s;
  int step_index = 0;
  bool terminated = false;  // task termination (failure or goal)
  bool truncated = false;   // step limit reached
  bool done() const { return terminated || truncated; }
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool done = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& bounds() const = 0;
  virtual EnvState reset(RngStream& rng) const = 0;
  /// Clips the action to [a_min, a_max] before applying dynamics. Throws
  /// StateError when called on a finished state.
  StepResult step(const EnvState& state, const Eigen::VectorXd& action) const;

 protected:
  struct Transition {
    Eigen::VectorXd s;
    double reward;
    bool terminated;
  };
  virtual Transition dynamics(const Eigen::VectorXd& s, const Eigen::VectorXd& u) const = 0;
};

// Physics constants. tests/fixtures/env_constants.json pins the same values.
struct PendulumConstants {
  static constexpr double gravity = 10.0;
  static constexpr double mass = 1.0;
  static constexpr double length = 1.0;
  static constexpr double max_speed = 8.0;
  static constexpr double max_torque = 2.0;
  static constexpr double dt = 0.05;
};

struct MountainCarConstants {
  static constexpr double min_position = -1.2;
  static constexpr double max_position = 0.6;
  static constexpr double max_speed = 0.07;
  static constexpr double goal_position = 0.45;
  static constexpr double power = 0.0015;
  static constexpr double hill_gravity = 0.0025;
  static constexpr double goal_bonus = 100.0;
};

struct CartPoleConstants {
  static constexpr double gravity = 9.8;
  static constexpr double cart_mass = 1.0;
  static constexpr double pole_mass = 0.1;
  static constexpr double half_length = 0.5;
  static constexpr double force_mag = 10.0;
  static constexpr double dt = 0.05;
  static constexpr double x_threshold = 2.4;
  static constexpr double theta_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double velocity_limit = 10.0;
};

/// Inverted pendulum observed as (cos theta, sin theta, theta_dot), theta = 0
/// upright, torque in [-2, 2]. The angle itself never enters the state, so the
/// state is continuous across theta = +-pi.
class Pendulum final : public Environment {
 public:
  Pendulum();
  const EnvSpec& bounds() const override { return spec_; }
  EnvState reset(RngStream& rng) const override;
  static Eigen::VectorXd observe(double theta, double theta_dot);
  /// theta in [-pi, pi].
  static double angle(const Eigen::VectorXd& s);
  /// 1/2 theta_dot^2 + (3g/2l) cos(theta): conserved by the unforced continuous dynamics.
  static double energy(const Eigen::VectorXd& s);

 private:
  Transition dynamics(const Eigen::VectorXd& s, const Eigen::VectorXd& u) const override;
  EnvSpec spec_;
};

/// Continuous mountain car, state (position, velocity), force in [-1, 1].
class MountainCar final : public Environment {
 public:
  MountainCar();
  const EnvSpec& bounds() const override { return spec_; }
  EnvState reset(RngStream& rng) const override;

 private:
  Transition dynamics(const Eigen::VectorXd& s, const Eigen::VectorXd& u) const override;
  EnvSpec spec_;
};

/// Cart-pole with a continuous force in [-10, 10] N; optionally the force is
/// replaced by +-force_mag according to the sign of the action.
class CartPole final : public Environment {
 public:
  explicit CartPole(bool discrete_force = false);
  const EnvSpec& bounds() const override { return spec_; }
  EnvState reset(RngStream& rng) const override;

 private:
  Transition dynamics(const Eigen::VectorXd& s, const Eigen::VectorXd& u) const override;
  EnvSpec spec_;
  bool discrete_force_;
};

/// "pendulum", "mountaincar", "cartpole" (or "cartpole-discrete").
std::unique_ptr<Environment> make_environment(std::string_view name);

}  // namespace irl::env
