#pragma once

#include <string>
#include <utility>

#include <Eigen/Core>

#include "irl/heads.hpp"
#include "irl/memory.hpp"

namespace irl::obj {

struct LossReport {
  std::string name;
  double value = 0.0;
  double grad_norm = 0.0;
  double weight = 1.0;
};

struct ObjectiveResult {
  LossReport report;
  HeadGradients grads;  // only the slots the objective trains are non-zero
};

struct LipschitzParams {
  double lambda_p = 0.01;
  double lambda_v = 0.01;
  double bound_p = 10.0;
  double bound_v = 10.0;
};

struct RangeBounds {
  Eigen::VectorXd s_min, s_max, a_min, a_max;
};

// All objectives are pure: they read the heads and return a value plus the
// gradient with respect to the parameters they train. r_k = R_k / dt wherever
// a reward rate is needed.

/// sum_k ( r_k + ln(gamma) Q(y_k) + F.grad Q + 1/2 (GG^T) * hess Q )^2.
// With with_grads false, j_q, j_e and j_a compute only the value and leave
// every gradient slot zero; the trainer uses this for zero-weight objectives.

/// F and GG^T come from the target ESE/APG; trains q.
ObjectiveResult j_q(const Batch& batch, const IrlHeads& heads, const TargetSet& targets,
                    bool with_grads = true);

/// sum_k ( Q(y_k) - R_k - gamma^dt Q'(y_k') )^2 with Q' the target value net.
/// The bootstrap term is dropped for units flagged done. Trains q.
ObjectiveResult j_q_prime(const Batch& batch, const IrlHeads& heads, const TargetSet& targets);

/// (dt/2) sum_k || g^-1 f ||^2. Trains f, g.
ObjectiveResult j_e(const Batch& batch, const IrlHeads& heads, bool with_grads = true);

/// sum_k || s_k + f dt - s_k' ||^2. Trains f.
ObjectiveResult j_e_prime(const Batch& batch, const IrlHeads& heads);

/// sum_k Q(y_k)/(2 dt) || sigma^-1 (a_k' - a_k - mu dt) ||^2, Q held fixed. Trains mu, sigma.
ObjectiveResult j_a(const Batch& batch, const IrlHeads& heads, bool with_grads = true);

/// -sum_k ( mu . dQ/da + 1/2 sum_i sigma_i^2 d2Q/da_i^2 ), Q held fixed. Trains mu, sigma.
ObjectiveResult j_a_prime(const Batch& batch, const IrlHeads& heads);

/// Hinge penalties on the Frobenius norms of the input Jacobians:
/// first = ESE (f, g), second = APG (mu, sigma).
std::pair<ObjectiveResult, ObjectiveResult> j_lip(const IrlHeads& heads, const Batch& batch,
                                                  const LipschitzParams& params);

/// lambda sum_k ||relu(y_k + dy_k - y_max)||^2 + ||relu(y_min - y_k - dy_k)||^2 with
/// dy_k = (f dt, mu dt). Trains mu.
ObjectiveResult j_range(const Batch& batch, const IrlHeads& heads, const RangeBounds& bounds,
                        double lambda);

/// Discretized Girsanov log-likelihood of the ESE drift with the Brownian
/// increments recovered from observed transitions:
///   sum_k u_k . g^-1 (s_k' - s_k) - (dt/2) sum_k ||u_k||^2,  u = g^-1 f.
double girsanov_log_likelihood(const Batch& batch, const IrlHeads& heads);

}  // namespace irl::obj
