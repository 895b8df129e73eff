#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irl::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Self-verification suites behind `irl check <suite>`. Each returns one result
// per individual check; none of them writes files unless given a stream.

/// Finite-difference agreement of parameter gradients, input gradients and
/// input Hessians on `nets` random networks (dims <= 8).
std::vector<CheckResult> check_gradients(std::uint64_t seed, int nets = 50);

/// Generator on linear and quadratic test functions against closed forms.
std::vector<CheckResult> check_operators(std::uint64_t seed, int draws = 100);

/// Euler-Maruyama OU moments against the analytic mean and variance.
std::vector<CheckResult> check_ou(std::uint64_t seed, int paths = 10000);

/// Moment-vs-lag slopes of the SDE and white-noise policies; writes both
/// MomentReports to `csv` when non-null.
std::vector<CheckResult> check_continuity(std::uint64_t seed, int paths = 10000,
                                          std::ostream* csv = nullptr);

/// Least-squares fit of a linear drift head on a simulated OU path.
struct DriftFit {
  double slope = 0.0;
  double intercept = 0.0;
  double log_likelihood = 0.0;
};
DriftFit fit_linear_drift(double theta, double sigma, double dt, int transitions,
                          std::uint64_t seed);
std::vector<CheckResult> check_estimation(std::uint64_t seed, int seeds = 10);

/// "suite" names accepted by run_suite.
const std::vector<std::string>& suite_names();
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed,
                                   std::ostream* csv = nullptr);

}  // namespace irl::checks
