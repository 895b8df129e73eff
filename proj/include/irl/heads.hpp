#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "irl/rng.hpp"
#include "irl/sde.hpp"
#include "irl/tensor_net.hpp"

namespace irl {

inline constexpr double kDiffusionFloor = 1e-3;

struct HeadConfig {
  int state_dim = 1;
  int action_dim = 1;
  std::vector<int> hidden = {64, 64};
  net::Activation activation = net::Activation::Sigmoid;
  double mu_max = 1.0;
  double eps_g = kDiffusionFloor;
  double eps_sigma = kDiffusionFloor;
};

/// Environment state estimator: ds = f(s,a) dt + diag(g(s,a)) dB.
struct EseHead {
  net::DenseNet drift_net;  // R^{n+m} -> R^n, linear output
  net::DenseNet diff_net;   // R^{n+m} -> R^n, softplus output; g = out + eps
  double eps = kDiffusionFloor;
};

/// Action policy generator: da = mu(s,a) dt + diag(sigma(s,a)) dB~.
struct ApgHead {
  net::DenseNet drift_net;  // tanh output; mu = mu_max * out
  net::DenseNet diff_net;   // softplus output; sigma = out + eps
  double mu_max = 1.0;
  double eps = kDiffusionFloor;
};

/// Value estimator Q(s,a).
struct VeHead {
  net::DenseNet q_net;  // R^{n+m} -> R
};

struct IrlHeads {
  int state_dim = 0;
  int action_dim = 0;
  EseHead ese;
  ApgHead apg;
  VeHead ve;

  static IrlHeads initialize(const HeadConfig& cfg, RngStream& rng);
  /// All parameters zero (useful for closed-form checks).
  static IrlHeads zeros(const HeadConfig& cfg);

  int joint_dim() const { return state_dim + action_dim; }
  bool operator==(const IrlHeads& other) const;
};

/// Frozen copies theta', theta_v', theta_p'.
using TargetSet = IrlHeads;

void refresh_targets(const IrlHeads& heads, TargetSet& targets);

/// FNV-1a over every parameter bit pattern.
std::uint64_t parameter_hash(const IrlHeads& heads);

/// One gradient slot per network, shaped like the heads they came from.
struct HeadGradients {
  net::ParamSet q, f, g, mu, sigma;

  static HeadGradients zeros_like(const IrlHeads& heads);
  void add_scaled(const HeadGradients& other, double s);
  double norm() const;
  bool all_finite() const;
};

Eigen::VectorXd join(const Eigen::VectorXd& s, const Eigen::VectorXd& a);

struct EseEval {
  Eigen::VectorXd f;
  Eigen::VectorXd g_diag;
};
struct ApgEval {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma_diag;
};
struct QDerivatives {
  double q = 0.0;
  Eigen::VectorXd grad;  // d/dy, y = (s, a)
  Eigen::MatrixXd hess;
};

EseEval ese_eval(const EseHead& head, const Eigen::VectorXd& s, const Eigen::VectorXd& a);
ApgEval apg_eval(const ApgHead& head, const Eigen::VectorXd& s, const Eigen::VectorXd& a);
QDerivatives q_eval_with_derivs(const VeHead& head, const Eigen::VectorXd& s,
                                const Eigen::VectorXd& a);

/// Block-diagonal merge: F = (f, mu), G = diag(g, sigma).
sde::DiffusionSpec merged_spec(const EseHead& ese, const ApgHead& apg, int state_dim,
                               int action_dim);

void to_json(nlohmann::json& j, const IrlHeads& h);
void from_json(const nlohmann::json& j, IrlHeads& h);

}  // namespace irl
