#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "irl/rng.hpp"

namespace irl {

/// (s_k, a_k, R_k, s_k', a_k'): the record every objective consumes.
struct TrainingUnit {
  Eigen::VectorXd s;
  Eigen::VectorXd a;
  double reward = 0.0;
  Eigen::VectorXd s_next;
  Eigen::VectorXd a_next;
  bool done = false;
};

struct Batch {
  std::vector<TrainingUnit> units;
  double dt = 0.05;
  double gamma = 0.6;

  /// Throws if empty, dimensionally inconsistent, or dt/gamma out of range.
  void validate() const;
  int state_dim() const { return static_cast<int>(units.front().s.size()); }
  int action_dim() const { return static_cast<int>(units.front().a.size()); }
};

inline constexpr double kAdmissionLow = 0.3;
inline constexpr double kAdmissionHigh = 0.9;

/// FIFO ring buffer of training units.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void push(TrainingUnit unit);
  /// Storage-gating variant: the unit is stored with probability
  /// admission_probability(R) (the reward range is updated either way).
  /// Returns whether it was stored.
  bool push_gated(TrainingUnit unit, RngStream& rng);
  void clear();

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const { return insertions_; }
  bool empty() const { return size_ == 0; }
  /// i = 0 is the oldest stored unit.
  const TrainingUnit& at(std::size_t i) const;

  /// batch_size draws, uniform with replacement.
  Batch sample_uniform(std::size_t batch_size, RngStream& rng, double dt, double gamma) const;
  /// Every stored unit admitted independently with admission_probability(R).
  Batch sample_bernoulli_compressed(RngStream& rng, double dt, double gamma) const;

  /// Affine min-max map of R onto [0.3, 0.9] using the running reward range;
  /// degenerate range maps to the lower bound.
  double admission_probability(double reward) const;
  double reward_low() const { return reward_lo_; }
  double reward_high() const { return reward_hi_; }

  /// Columnar dump: s0..,a0..,R,s_next0..,a_next0..,done (oldest first).
  void dump_csv(std::ostream& os) const;

 private:
  void check_unit(const TrainingUnit& unit) const;
  void observe_reward(double r);

  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  std::vector<TrainingUnit> ring_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  std::uint64_t insertions_ = 0;
  double reward_lo_ = std::numeric_limits<double>::infinity();
  double reward_hi_ = -std::numeric_limits<double>::infinity();
};

}  // namespace irl
