#include "irl/memory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "irl/errors.hpp"

namespace irl {

void Batch::validate() const {
  if (units.empty()) throw StateError("Batch: no training units");
  if (!(dt > 0.0)) throw DomainError("Batch: dt must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("Batch: gamma must lie in (0, 1)");
  const auto n = units.front().s.size();
  const auto m = units.front().a.size();
  for (const auto& u : units)
    require_shape(u.s.size() == n && u.s_next.size() == n && u.a.size() == m &&
                      u.a_next.size() == m,
                  "Batch: training units have inconsistent dimensions");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw DomainError("ReplayBuffer: capacity must be positive");
  if (state_dim <= 0 || action_dim <= 0) throw ShapeError("ReplayBuffer: dims must be positive");
  ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::check_unit(const TrainingUnit& u) const {
  require_shape(u.s.size() == state_dim_ && u.s_next.size() == state_dim_ &&
                    u.a.size() == action_dim_ && u.a_next.size() == action_dim_,
                "ReplayBuffer::push: unit dims do not match buffer schema (" +
                    std::to_string(state_dim_) + ", " + std::to_string(action_dim_) + ")");
  if (!std::isfinite(u.reward)) throw NonFiniteError("ReplayBuffer::push: non-finite reward");
}

void ReplayBuffer::observe_reward(double r) {
  reward_lo_ = std::min(reward_lo_, r);
  reward_hi_ = std::max(reward_hi_, r);
}

void ReplayBuffer::push(TrainingUnit unit) {
  check_unit(unit);
  observe_reward(unit.reward);
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(unit));
  } else {
    ring_[next_] = std::move(unit);
  }
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++insertions_;
}

bool ReplayBuffer::push_gated(TrainingUnit unit, RngStream& rng) {
  check_unit(unit);
  observe_reward(unit.reward);
  if (!rng.bernoulli(admission_probability(unit.reward))) return false;
  push(std::move(unit));
  return true;
}

void ReplayBuffer::clear() {
  ring_.clear();
  next_ = 0;
  size_ = 0;
  reward_lo_ = std::numeric_limits<double>::infinity();
  reward_hi_ = -std::numeric_limits<double>::infinity();
}

const TrainingUnit& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ShapeError("ReplayBuffer::at: index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : next_;
  return ring_[(oldest + i) % capacity_];
}

Batch ReplayBuffer::sample_uniform(std::size_t batch_size, RngStream& rng, double dt,
                                   double gamma) const {
  if (empty()) throw StateError("sample_uniform: replay buffer is empty");
  Batch batch;
  batch.dt = dt;
  batch.gamma = gamma;
  batch.units.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.units.push_back(at(rng.uniform_index(size_)));
  return batch;
}

Batch ReplayBuffer::sample_bernoulli_compressed(RngStream& rng, double dt, double gamma) const {
  if (empty()) throw StateError("sample_bernoulli_compressed: replay buffer is empty");
  Batch batch;
  batch.dt = dt;
  batch.gamma = gamma;
  for (std::size_t i = 0; i < size_; ++i) {
    const auto& u = at(i);
    if (rng.bernoulli(admission_probability(u.reward))) batch.units.push_back(u);
  }
  return batch;
}

double ReplayBuffer::admission_probability(double reward) const {
  const double range = reward_hi_ - reward_lo_;
  if (!(range > 0.0) || !std::isfinite(range)) return kAdmissionLow;
  const double p =
      kAdmissionLow + (kAdmissionHigh - kAdmissionLow) * (reward - reward_lo_) / range;
  return std::clamp(p, kAdmissionLow, kAdmissionHigh);
}

void ReplayBuffer::dump_csv(std::ostream& os) const {
  for (int i = 0; i < state_dim_; ++i) os << "s" << i << ",";
  for (int i = 0; i < action_dim_; ++i) os << "a" << i << ",";
  os << "R,";
  for (int i = 0; i < state_dim_; ++i) os << "s_next" << i << ",";
  for (int i = 0; i < action_dim_; ++i) os << "a_next" << i << ",";
  os << "done\n";
  const auto old_prec = os.precision(17);
  for (std::size_t k = 0; k < size_; ++k) {
    const auto& u = at(k);
    for (double v : u.s) os << v << ",";
    for (double v : u.a) os << v << ",";
    os << u.reward << ",";
    for (double v : u.s_next) os << v << ",";
    for (double v : u.a_next) os << v << ",";
    os << (u.done ? 1 : 0) << "\n";
  }
  os.precision(old_prec);
}

}  // namespace irl
