#pragma once

#include <cstdint>
#include <Eigen/Core>

namespace irl {

// Counter-based generator: every draw is a SplitMix64 hash of (key, counter),
// so a stream is fully described by two integers and split() never overlaps.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  /// Independent child stream keyed by `tag`; does not advance this stream.
  RngStream split(std::uint64_t tag) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller (one cached spare).
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index dim);
  bool bernoulli(double p);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace irl
