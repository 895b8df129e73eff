#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "irl/rng.hpp"

namespace irl::sde {

/// dY = F(Y) dt + G(Y) dB on R^dim.
struct DiffusionSpec {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> diffusion;
};

/// Scalar Ornstein-Uhlenbeck process dX = theta (mu - X) dt + sigma dB.
DiffusionSpec ornstein_uhlenbeck(double theta, double mu, double sigma);

/// i.i.d. N(0, dt) components.
Eigen::VectorXd brownian_increment(RngStream& rng, int dim, double dt);

/// y + F(y) dt + G(y) dB. Throws NonFiniteError if the result is not finite.
Eigen::VectorXd euler_step(const DiffusionSpec& spec, const Eigen::VectorXd& y, double dt,
                           const Eigen::VectorXd& dB);

/// Generator of the diffusion applied to a scalar function q at one point:
///   F . grad q + 1/2 sum_ij (G G^T)_ij d2q/dy_i dy_j
double apply_generator(const Eigen::VectorXd& drift, const Eigen::MatrixXd& ggt,
                       const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess);

/// ln(gamma) q + apply_generator(...). gamma must lie in (0, 1).
double apply_L(double gamma, double q_value, const Eigen::VectorXd& drift,
               const Eigen::MatrixXd& ggt, const Eigen::VectorXd& grad,
               const Eigen::MatrixXd& hess);

/// Path of length steps + 1 starting at y0, one Euler-Maruyama step per increment.
std::vector<Eigen::VectorXd> simulate_path(const DiffusionSpec& spec, const Eigen::VectorXd& y0,
                                           double dt, int steps, RngStream& rng);

}  // namespace irl::sde
