#include "irl/objectives.hpp"

#include <cmath>

#include "irl/errors.hpp"

namespace irl::obj {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Columns {
  MatrixXd s, a, y, s_next, a_next, y_next;
  Eigen::RowVectorXd reward, not_done;
};

Columns columns(const Batch& batch, const IrlHeads& heads) {
  batch.validate();
  require_shape(batch.state_dim() == heads.state_dim && batch.action_dim() == heads.action_dim,
                "objective: batch dims do not match heads");
  const Eigen::Index b = static_cast<Eigen::Index>(batch.units.size());
  const int n = heads.state_dim;
  const int m = heads.action_dim;
  Columns c{MatrixXd(n, b), MatrixXd(m, b), MatrixXd(n + m, b), MatrixXd(n, b),
            MatrixXd(m, b), MatrixXd(n + m, b), Eigen::RowVectorXd(b), Eigen::RowVectorXd(b)};
  for (Eigen::Index k = 0; k < b; ++k) {
    const auto& u = batch.units[static_cast<std::size_t>(k)];
    c.s.col(k) = u.s;
    c.a.col(k) = u.a;
    c.s_next.col(k) = u.s_next;
    c.a_next.col(k) = u.a_next;
    c.reward[k] = u.reward;
    c.not_done[k] = u.done ? 0.0 : 1.0;
  }
  c.y << c.s, c.a;
  c.y_next << c.s_next, c.a_next;
  return c;
}

ObjectiveResult finish(std::string name, double value, HeadGradients grads) {
  if (!std::isfinite(value)) throw NonFiniteError(name + ": non-finite objective value");
  const double gn = grads.norm();
  return {{std::move(name), value, gn, 1.0}, std::move(grads)};
}

// Central-difference step used for second input derivatives, per entry.
MatrixXd hessian_steps(const MatrixXd& y) {
  return y.unaryExpr([](double v) { return net::kHessianStep * std::max(1.0, std::abs(v)); });
}

// Diagonal second derivatives d2 out_0 / dy_i^2 for the listed coordinates, by
// central differences of the exact directional derivative (same stencil as
// DenseNet::input_hessian).
MatrixXd hessian_diagonal(const net::DenseNet& net, const MatrixXd& y, const MatrixXd& steps,
                          int first, int count) {
  const Eigen::Index b = y.cols();
  MatrixXd out(count, b);
  for (int i = 0; i < count; ++i) {
    const int idx = first + i;
    MatrixXd dirs = MatrixXd::Zero(y.rows(), b);
    dirs.row(idx).setOnes();
    MatrixXd yp = y, ym = y;
    yp.row(idx) += steps.row(idx);
    ym.row(idx) -= steps.row(idx);
    const MatrixXd tp = net.forward_tangent(yp, dirs).tangent;
    const MatrixXd tm = net.forward_tangent(ym, dirs).tangent;
    out.row(i) = (tp - tm).array() / (2.0 * steps.row(idx).array());
  }
  return out;
}

// Gradient of sum_b c_b * d2Q/dy_i^2 (b) for i in [first, first+count): the
// weights c are given per coordinate as rows of `coef`.
net::ParamSet hessian_diagonal_param_grad(const net::DenseNet& net, const MatrixXd& y,
                                          const MatrixXd& steps, int first, int count,
                                          const MatrixXd& coef) {
  const Eigen::Index b = y.cols();
  const Eigen::Index d = y.rows();
  MatrixXd xs(d, 2 * count * b), dirs = MatrixXd::Zero(d, 2 * count * b);
  MatrixXd tan_cot(1, 2 * count * b);
  for (int i = 0; i < count; ++i) {
    const int idx = first + i;
    const Eigen::Index off = 2 * i * b;
    xs.middleCols(off, b) = y;
    xs.middleCols(off + b, b) = y;
    xs.block(idx, off, 1, b) += steps.row(idx);
    xs.block(idx, off + b, 1, b) -= steps.row(idx);
    dirs.block(idx, off, 1, 2 * b).setOnes();
    const Eigen::RowVectorXd w = coef.row(i).array() / (2.0 * steps.row(idx).array());
    tan_cot.middleCols(off, b) = w;
    tan_cot.middleCols(off + b, b) = -w;
  }
  return net.tangent_param_gradients(xs, dirs, MatrixXd::Zero(1, xs.cols()), tan_cot);
}

}  // namespace

ObjectiveResult j_q(const Batch& batch, const IrlHeads& heads, const TargetSet& targets,
                    bool with_grads) {
  const Columns c = columns(batch, heads);
  const int n = heads.state_dim;
  const int m = heads.action_dim;
  const int d = n + m;
  const Eigen::Index b = c.y.cols();
  const double log_gamma = std::log(batch.gamma);

  // Drift and diagonal of G G^T from the frozen ESE/APG copies.
  MatrixXd drift(d, b), ggt_diag(d, b);
  drift << targets.ese.drift_net.forward_batch(c.y),
      targets.apg.mu_max * targets.apg.drift_net.forward_batch(c.y);
  ggt_diag << (targets.ese.diff_net.forward_batch(c.y).array() + targets.ese.eps).square(),
      (targets.apg.diff_net.forward_batch(c.y).array() + targets.apg.eps).square();

  const auto& q_net = heads.ve.q_net;
  const auto first = q_net.forward_tangent(c.y, drift);  // Q and F . grad Q
  const MatrixXd steps = hessian_steps(c.y);
  const MatrixXd hdiag = hessian_diagonal(q_net, c.y, steps, 0, d);

  const Eigen::RowVectorXd residual =
      c.reward / batch.dt + log_gamma * first.out.row(0) + first.tangent.row(0) +
      0.5 * ggt_diag.cwiseProduct(hdiag).colwise().sum();
  const double value = residual.squaredNorm();

  HeadGradients g = HeadGradients::zeros_like(heads);
  if (!with_grads) return finish("J_Q", value, std::move(g));
  const Eigen::RowVectorXd two_r = 2.0 * residual;
  g.q = q_net.tangent_param_gradients(c.y, drift, log_gamma * two_r, two_r);
  MatrixXd coef = 0.5 * ggt_diag;
  coef.array().rowwise() *= two_r.array();
  g.q += hessian_diagonal_param_grad(q_net, c.y, steps, 0, d, coef);
  return finish("J_Q", value, std::move(g));
}

ObjectiveResult j_q_prime(const Batch& batch, const IrlHeads& heads, const TargetSet& targets) {
  const Columns c = columns(batch, heads);
  const double discount = std::pow(batch.gamma, batch.dt);
  const Eigen::RowVectorXd q = heads.ve.q_net.forward_batch(c.y);
  const Eigen::RowVectorXd q_next = targets.ve.q_net.forward_batch(c.y_next);
  const Eigen::RowVectorXd residual =
      q - c.reward - discount * q_next.cwiseProduct(c.not_done);
  HeadGradients g = HeadGradients::zeros_like(heads);
  g.q = heads.ve.q_net.param_gradients_batch(c.y, 2.0 * residual);
  return finish("J_Q_prime", residual.squaredNorm(), std::move(g));
}

ObjectiveResult j_e(const Batch& batch, const IrlHeads& heads, bool with_grads) {
  const Columns c = columns(batch, heads);
  const MatrixXd f = heads.ese.drift_net.forward_batch(c.y);
  const MatrixXd g_diag = heads.ese.diff_net.forward_batch(c.y).array() + heads.ese.eps;
  const MatrixXd u = f.cwiseQuotient(g_diag);
  const double value = 0.5 * batch.dt * u.squaredNorm();
  HeadGradients g = HeadGradients::zeros_like(heads);
  if (!with_grads) return finish("J_E", value, std::move(g));
  g.f = heads.ese.drift_net.param_gradients_batch(c.y, batch.dt * u.cwiseQuotient(g_diag));
  g.g = heads.ese.diff_net.param_gradients_batch(
      c.y, -batch.dt * u.cwiseAbs2().cwiseQuotient(g_diag));
  return finish("J_E", value, std::move(g));
}

ObjectiveResult j_e_prime(const Batch& batch, const IrlHeads& heads) {
  const Columns c = columns(batch, heads);
  const MatrixXd f = heads.ese.drift_net.forward_batch(c.y);
  const MatrixXd residual = c.s + f * batch.dt - c.s_next;
  HeadGradients g = HeadGradients::zeros_like(heads);
  g.f = heads.ese.drift_net.param_gradients_batch(c.y, 2.0 * batch.dt * residual);
  return finish("J_E_prime", residual.squaredNorm(), std::move(g));
}

ObjectiveResult j_a(const Batch& batch, const IrlHeads& heads, bool with_grads) {
  const Columns c = columns(batch, heads);
  const double dt = batch.dt;
  const Eigen::RowVectorXd q = heads.ve.q_net.forward_batch(c.y);
  const MatrixXd mu = heads.apg.mu_max * heads.apg.drift_net.forward_batch(c.y);
  const MatrixXd sigma = heads.apg.diff_net.forward_batch(c.y).array() + heads.apg.eps;
  const MatrixXd z = (c.a_next - c.a - mu * dt).cwiseQuotient(sigma);
  const Eigen::RowVectorXd w = q / (2.0 * dt);
  const double value = (w.array() * z.cwiseAbs2().colwise().sum().array()).sum();
  HeadGradients g = HeadGradients::zeros_like(heads);
  if (!with_grads) return finish("J_A", value, std::move(g));

  MatrixXd mu_cot = -2.0 * dt * heads.apg.mu_max * z.cwiseQuotient(sigma);
  MatrixXd sigma_cot = -2.0 * z.cwiseAbs2().cwiseQuotient(sigma);
  mu_cot.array().rowwise() *= w.array();
  sigma_cot.array().rowwise() *= w.array();
  g.mu = heads.apg.drift_net.param_gradients_batch(c.y, mu_cot);
  g.sigma = heads.apg.diff_net.param_gradients_batch(c.y, sigma_cot);
  return finish("J_A", value, std::move(g));
}

ObjectiveResult j_a_prime(const Batch& batch, const IrlHeads& heads) {
  const Columns c = columns(batch, heads);
  const int n = heads.state_dim;
  const int m = heads.action_dim;
  const auto& q_net = heads.ve.q_net;
  const Eigen::Index b = c.y.cols();

  MatrixXd dq_da(m, b);
  for (int i = 0; i < m; ++i) {
    MatrixXd dirs = MatrixXd::Zero(n + m, b);
    dirs.row(n + i).setOnes();
    dq_da.row(i) = q_net.forward_tangent(c.y, dirs).tangent.row(0);
  }
  const MatrixXd d2q_da2 = hessian_diagonal(q_net, c.y, hessian_steps(c.y), n, m);
  const MatrixXd mu = heads.apg.mu_max * heads.apg.drift_net.forward_batch(c.y);
  const MatrixXd sigma = heads.apg.diff_net.forward_batch(c.y).array() + heads.apg.eps;

  const double value =
      -(mu.cwiseProduct(dq_da).sum() + 0.5 * sigma.cwiseAbs2().cwiseProduct(d2q_da2).sum());
  HeadGradients g = HeadGradients::zeros_like(heads);
  g.mu = heads.apg.drift_net.param_gradients_batch(c.y, -heads.apg.mu_max * dq_da);
  g.sigma = heads.apg.diff_net.param_gradients_batch(c.y, -sigma.cwiseProduct(d2q_da2));
  return finish("J_A_prime", value, std::move(g));
}

namespace {

// Per-column Frobenius norm of the input Jacobian of `net` (scaled by
// `scale`), plus the tangents needed to differentiate it.
struct JacobianNorm {
  Eigen::RowVectorXd norm;
  MatrixXd dirs, tangents;  // d*B columns, direction-major
};

JacobianNorm jacobian_norm(const net::DenseNet& net, const MatrixXd& y, double scale) {
  const Eigen::Index d = y.rows();
  const Eigen::Index b = y.cols();
  JacobianNorm r{Eigen::RowVectorXd(b), MatrixXd::Zero(d, d * b), {}};
  for (Eigen::Index j = 0; j < d; ++j) r.dirs.block(j, j * b, 1, b).setOnes();
  r.tangents = net.forward_tangents(y, r.dirs).tangent;
  const Eigen::RowVectorXd sq = r.tangents.cwiseAbs2().colwise().sum();
  r.norm.setZero();
  for (Eigen::Index j = 0; j < d; ++j) r.norm += sq.middleCols(j * b, b);
  r.norm = scale * r.norm.cwiseSqrt();
  return r;
}

// Gradient of sum_b weight_b * ||J(y_b)||_F (scaled net output).
net::ParamSet jacobian_norm_grad(const net::DenseNet& net, const MatrixXd& y,
                                 const JacobianNorm& jn, double scale,
                                 const Eigen::RowVectorXd& weight) {
  const Eigen::Index b = jn.norm.size();
  const Eigen::Index d = y.rows();
  MatrixXd tan_cot = jn.tangents;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < b; ++k) {
      const double nrm = jn.norm[k];
      // ||scale*J|| = scale ||J||; d/dJ = scale^2 J / ||scale*J||
      const double w = nrm > 0.0 ? weight[k] * scale * scale / nrm : 0.0;
      tan_cot.col(j * b + k) *= w;
    }
  }
  return net.tangent_param_gradients(y, jn.dirs, MatrixXd::Zero(tan_cot.rows(), b), tan_cot);
}

}  // namespace

std::pair<ObjectiveResult, ObjectiveResult> j_lip(const IrlHeads& heads, const Batch& batch,
                                                  const LipschitzParams& params) {
  const Columns c = columns(batch, heads);

  auto hinge = [&](const net::DenseNet& drift, double drift_scale, const net::DenseNet& diff,
                   double lambda, double bound, net::ParamSet& drift_grad,
                   net::ParamSet& diff_grad) {
    const JacobianNorm jd = jacobian_norm(drift, c.y, drift_scale);
    const JacobianNorm jg = jacobian_norm(diff, c.y, 1.0);
    const Eigen::RowVectorXd excess = (jd.norm + jg.norm).array() - bound;
    const Eigen::RowVectorXd active = (excess.array() > 0.0).cast<double>() * lambda;
    if (active.isZero()) return 0.0;  // gradients stay zero-initialized
    drift_grad = jacobian_norm_grad(drift, c.y, jd, drift_scale, active);
    diff_grad = jacobian_norm_grad(diff, c.y, jg, 1.0, active);
    return lambda * excess.cwiseMax(0.0).sum();
  };

  HeadGradients gp = HeadGradients::zeros_like(heads);
  HeadGradients gv = HeadGradients::zeros_like(heads);
  const double vp = hinge(heads.ese.drift_net, 1.0, heads.ese.diff_net, params.lambda_p,
                          params.bound_p, gp.f, gp.g);
  const double vv = hinge(heads.apg.drift_net, heads.apg.mu_max, heads.apg.diff_net,
                          params.lambda_v, params.bound_v, gv.mu, gv.sigma);
  return {finish("J_Lip_p", vp, std::move(gp)), finish("J_Lip_v", vv, std::move(gv))};
}

ObjectiveResult j_range(const Batch& batch, const IrlHeads& heads, const RangeBounds& bounds,
                        double lambda) {
  const Columns c = columns(batch, heads);
  const int n = heads.state_dim;
  const int m = heads.action_dim;
  require_shape(bounds.s_min.size() == n && bounds.s_max.size() == n &&
                    bounds.a_min.size() == m && bounds.a_max.size() == m,
                "j_range: bounds dimension mismatch");
  const double dt = batch.dt;
  const MatrixXd s_pred = c.s + heads.ese.drift_net.forward_batch(c.y) * dt;
  const MatrixXd a_pred = c.a + heads.apg.mu_max * heads.apg.drift_net.forward_batch(c.y) * dt;

  auto over = [](const MatrixXd& p, const VectorXd& hi) {
    return (p.colwise() - hi).cwiseMax(0.0).eval();
  };
  auto under = [](const MatrixXd& p, const VectorXd& lo) {
    return ((-p).colwise() + lo).cwiseMax(0.0).eval();
  };
  const MatrixXd s_over = over(s_pred, bounds.s_max), s_under = under(s_pred, bounds.s_min);
  const MatrixXd a_over = over(a_pred, bounds.a_max), a_under = under(a_pred, bounds.a_min);
  const double value = lambda * (s_over.squaredNorm() + s_under.squaredNorm() +
                                 a_over.squaredNorm() + a_under.squaredNorm());

  HeadGradients g = HeadGradients::zeros_like(heads);
  const MatrixXd mu_cot = lambda * 2.0 * dt * heads.apg.mu_max * (a_over - a_under);
  g.mu = heads.apg.drift_net.param_gradients_batch(c.y, mu_cot);
  return finish("J_Range", value, std::move(g));
}

double girsanov_log_likelihood(const Batch& batch, const IrlHeads& heads) {
  const Columns c = columns(batch, heads);
  const MatrixXd f = heads.ese.drift_net.forward_batch(c.y);
  const MatrixXd g_diag = heads.ese.diff_net.forward_batch(c.y).array() + heads.ese.eps;
  const MatrixXd u = f.cwiseQuotient(g_diag);
  const MatrixXd db = (c.s_next - c.s).cwiseQuotient(g_diag);
  return u.cwiseProduct(db).sum() - 0.5 * batch.dt * u.squaredNorm();
}

}  // namespace irl::obj
