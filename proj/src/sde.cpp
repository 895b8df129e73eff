#include "irl/sde.hpp"

#include <cmath>
#include <string>

#include "irl/errors.hpp"

namespace irl::sde {

DiffusionSpec ornstein_uhlenbeck(double theta, double mu, double sigma) {
  DiffusionSpec spec;
  spec.dim = 1;
  spec.drift = [=](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, theta * (mu - x[0]));
  };
  spec.diffusion = [=](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, sigma); };
  return spec;
}

Eigen::VectorXd brownian_increment(RngStream& rng, int dim, double dt) {
  if (!(dt > 0.0)) throw DomainError("brownian_increment: dt must be positive");
  if (dim < 0) throw ShapeError("brownian_increment: negative dimension");
  return std::sqrt(dt) * rng.normal_vector(dim);
}

Eigen::VectorXd euler_step(const DiffusionSpec& spec, const Eigen::VectorXd& y, double dt,
                           const Eigen::VectorXd& dB) {
  require_shape(y.size() == spec.dim && dB.size() == spec.dim,
                "euler_step: state/increment dimension does not match spec dim " +
                    std::to_string(spec.dim));
  const Eigen::VectorXd f = spec.drift(y);
  const Eigen::MatrixXd g = spec.diffusion(y);
  require_shape(f.size() == spec.dim && g.rows() == spec.dim && g.cols() == spec.dim,
                "euler_step: drift/diffusion returned wrong shape");
  Eigen::VectorXd next = y + f * dt + g * dB;
  if (!next.allFinite()) throw NonFiniteError("euler_step: non-finite state");
  return next;
}

double apply_generator(const Eigen::VectorXd& drift, const Eigen::MatrixXd& ggt,
                       const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
  const Eigen::Index n = drift.size();
  require_shape(grad.size() == n && ggt.rows() == n && ggt.cols() == n && hess.rows() == n &&
                    hess.cols() == n,
                "apply_generator: inconsistent dimensions");
  return drift.dot(grad) + 0.5 * ggt.cwiseProduct(hess).sum();
}

double apply_L(double gamma, double q_value, const Eigen::VectorXd& drift,
               const Eigen::MatrixXd& ggt, const Eigen::VectorXd& grad,
               const Eigen::MatrixXd& hess) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("apply_L: gamma must lie in (0, 1)");
  return std::log(gamma) * q_value + apply_generator(drift, ggt, grad, hess);
}

std::vector<Eigen::VectorXd> simulate_path(const DiffusionSpec& spec, const Eigen::VectorXd& y0,
                                           double dt, int steps, RngStream& rng) {
  if (steps < 1) throw DomainError("simulate_path: steps must be >= 1");
  std::vector<Eigen::VectorXd> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(y0);
  for (int k = 0; k < steps; ++k)
    path.push_back(euler_step(spec, path.back(), dt, brownian_increment(rng, spec.dim, dt)));
  return path;
}

}  // namespace irl::sde
