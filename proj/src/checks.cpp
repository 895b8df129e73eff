#include "irl/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "irl/adam.hpp"
#include "irl/continuity.hpp"
#include "irl/errors.hpp"
#include "irl/heads.hpp"
#include "irl/memory.hpp"
#include "irl/objectives.hpp"
#include "irl/sde.hpp"
#include "irl/tensor_net.hpp"

namespace irl::checks {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double rel_error(const VectorXd& a, const VectorXd& ref) {
  return (a - ref).norm() / std::max(ref.norm(), 1e-8);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

net::DenseNet random_net(RngStream& rng) {
  const net::Activation acts[] = {net::Activation::Linear, net::Activation::Sigmoid,
                                  net::Activation::Tanh, net::Activation::Softplus};
  const int depth = 1 + static_cast<int>(rng.uniform_index(3));
  std::vector<int> dims;
  for (int i = 0; i <= depth; ++i) dims.push_back(1 + static_cast<int>(rng.uniform_index(8)));
  const auto hidden = acts[1 + rng.uniform_index(3)];
  const auto output = acts[rng.uniform_index(4)];
  auto net = net::DenseNet::glorot(dims, hidden, output, rng);
  // Non-zero biases so every code path sees them.
  auto flat = net.params().flatten();
  for (double& p : flat) p += 0.3 * rng.normal();
  net.params().assign(flat);
  return net;
}

// d(dot(c, f(theta))) by central differences over the flattened parameters.
template <class Eval>
VectorXd fd_param_gradient(net::DenseNet net, const Eval& eval, double h) {
  auto flat = net.params().flatten();
  VectorXd g(static_cast<Eigen::Index>(flat.size()));
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double p = flat[i];
    flat[i] = p + h;
    net.params().assign(flat);
    const double up = eval(net);
    flat[i] = p - h;
    net.params().assign(flat);
    const double down = eval(net);
    flat[i] = p;
    g[static_cast<Eigen::Index>(i)] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

std::vector<CheckResult> check_gradients(std::uint64_t seed, int nets) {
  RngStream rng(seed);
  double worst_param = 0.0, worst_input = 0.0, worst_hess = 0.0, worst_sym = 0.0,
         worst_tangent = 0.0;
  for (int k = 0; k < nets; ++k) {
    RngStream r = rng.split(static_cast<std::uint64_t>(k));
    const auto net = random_net(r);
    const VectorXd x = r.normal_vector(net.input_dim());
    const VectorXd u = r.normal_vector(net.output_dim());
    const VectorXd v = r.normal_vector(net.input_dim());
    const VectorXd c = r.normal_vector(net.output_dim());

    const VectorXd analytic = as_vector(net.param_gradients(x, u).flatten());
    const VectorXd fd = fd_param_gradient(
        net, [&](const net::DenseNet& n) { return u.dot(n.forward(x)); }, 1e-5);
    worst_param = std::max(worst_param, rel_error(analytic, fd));

    const MatrixXd jac = net.input_jacobian(x);
    MatrixXd jac_fd(net.output_dim(), net.input_dim());
    for (int i = 0; i < net.input_dim(); ++i) {
      VectorXd xp = x, xm = x;
      xp[i] += 1e-5;
      xm[i] -= 1e-5;
      jac_fd.col(i) = (net.forward(xp) - net.forward(xm)) / 2e-5;
    }
    worst_input = std::max(worst_input, rel_error(jac.reshaped(), jac_fd.reshaped()));

    const VectorXd tan_analytic =
        as_vector(net.tangent_param_gradients(x, v, MatrixXd::Zero(net.output_dim(), 1), c)
                      .flatten());
    const VectorXd tan_fd = fd_param_gradient(
        net,
        [&](const net::DenseNet& n) { return c.dot(n.forward_tangent(x, v).tangent.col(0)); },
        1e-6);
    worst_tangent = std::max(worst_tangent, rel_error(tan_analytic, tan_fd));

    for (int o = 0; o < net.output_dim(); ++o) {
      const MatrixXd hess = net.input_hessian(x, o);
      const double h = 1e-3;
      const int d = net.input_dim();
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          auto f = [&](double si, double sj) {
            VectorXd y = x;
            y[i] += si * h;
            y[j] += sj * h;
            return net.forward(y)[o];
          };
          const double second =
              (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * h * h);
          worst_hess = std::max(worst_hess, std::abs(hess(i, j) - second));
          worst_sym = std::max(worst_sym, std::abs(hess(i, j) - hess(j, i)));
        }
      }
    }
  }
  return {
      {"param_gradient", worst_param < 1e-6, "max rel err " + fmt(worst_param)},
      {"input_gradient", worst_input < 1e-6, "max rel err " + fmt(worst_input)},
      {"tangent_param_gradient", worst_tangent < 1e-6, "max rel err " + fmt(worst_tangent)},
      {"input_hessian", worst_hess < 1e-4, "max abs err " + fmt(worst_hess)},
      {"hessian_symmetry", worst_sym == 0.0, "max asymmetry " + fmt(worst_sym)},
  };
}

std::vector<CheckResult> check_operators(std::uint64_t seed, int draws) {
  RngStream rng(seed);
  double worst_lin = 0.0, worst_quad = 0.0, worst_form = 0.0, worst_l = 0.0;
  for (int k = 0; k < draws; ++k) {
    RngStream r = rng.split(static_cast<std::uint64_t>(k));
    const int dim = 1 + static_cast<int>(r.uniform_index(6));
    const VectorXd F = r.normal_vector(dim);
    const MatrixXd G = MatrixXd::NullaryExpr(dim, dim, [&] { return r.normal(); });
    const MatrixXd ggt = G * G.transpose();
    const VectorXd w = r.normal_vector(dim);

    // q(y) = w.y + c: gradient w, Hessian 0.
    const double lin = sde::apply_generator(F, ggt, w, MatrixXd::Zero(dim, dim));
    worst_lin = std::max(worst_lin, std::abs(lin - F.dot(w)));

    // q(x) = x^2 under dx = b dt + sigma dB: 2 b x + sigma^2.
    const double b = r.normal(), sigma = r.normal(), x = r.normal();
    const double quad = sde::apply_generator(VectorXd::Constant(1, b),
                                             MatrixXd::Constant(1, 1, sigma * sigma),
                                             VectorXd::Constant(1, 2.0 * x),
                                             MatrixXd::Constant(1, 1, 2.0));
    worst_quad = std::max(worst_quad, std::abs(quad - (2.0 * b * x + sigma * sigma)));

    // q(y) = y^T P y: 2 F.P y + tr(G G^T P).
    const MatrixXd A = MatrixXd::NullaryExpr(dim, dim, [&] { return r.normal(); });
    const MatrixXd P = 0.5 * (A + A.transpose());
    const VectorXd y = r.normal_vector(dim);
    const double form = sde::apply_generator(F, ggt, 2.0 * P * y, 2.0 * P);
    const double form_ref = 2.0 * F.dot(P * y) + (ggt * P).trace();
    worst_form = std::max(worst_form, std::abs(form - form_ref) / std::max(1.0, std::abs(form_ref)));

    const double gamma = r.uniform(0.05, 0.95);
    const double qv = r.normal();
    const double l = sde::apply_L(gamma, qv, F, ggt, w, MatrixXd::Zero(dim, dim));
    worst_l = std::max(worst_l, std::abs(l - (std::log(gamma) * qv + F.dot(w))));
  }
  return {
      {"generator_linear", worst_lin < 1e-12, "max abs err " + fmt(worst_lin)},
      {"generator_quadratic", worst_quad < 1e-12, "max abs err " + fmt(worst_quad)},
      {"generator_quadratic_form", worst_form < 1e-12, "max rel err " + fmt(worst_form)},
      {"operator_L_linear", worst_l < 1e-12, "max abs err " + fmt(worst_l)},
  };
}

std::vector<CheckResult> check_ou(std::uint64_t seed, int paths) {
  const double theta = 1.0, sigma = 0.5, x0 = 1.0, dt = 0.01;
  const int steps = 100;
  const auto spec = sde::ornstein_uhlenbeck(theta, 0.0, sigma);
  RngStream rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream r = rng.split(static_cast<std::uint64_t>(p));
    const auto path = sde::simulate_path(spec, VectorXd::Constant(1, x0), dt, steps, r);
    const double xt = path.back()[0];
    sum += xt;
    sum_sq += xt * xt;
  }
  const double n = paths;
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1.0);
  const double mean_ref = x0 * std::exp(-theta);
  const double var_ref = sigma * sigma * (1.0 - std::exp(-2.0 * theta)) / (2.0 * theta);
  const double se_mean = std::sqrt(var / n);
  const double se_var = var * std::sqrt(2.0 / (n - 1.0));

  // Weak order: error of the mean at T = 1 for dt in {0.04, 0.02, 0.01, 0.005}.
  // Antithetic increment pairs cancel the noise exactly for this linear SDE,
  // leaving the discretization bias.
  const double dts[] = {0.04, 0.02, 0.01, 0.005};
  const int pairs = std::max(1, paths / 2);
  std::vector<double> lx, ly;
  for (double h : dts) {
    const int n_steps = static_cast<int>(std::lround(1.0 / h));
    double acc = 0.0;
    for (int p = 0; p < pairs; ++p) {
      RngStream r = rng.split(0x5eedULL << 32 | static_cast<std::uint64_t>(p));
      VectorXd up = VectorXd::Constant(1, x0), down = up;
      for (int k = 0; k < n_steps; ++k) {
        const VectorXd dB = sde::brownian_increment(r, 1, h);
        up = sde::euler_step(spec, up, h, dB);
        down = sde::euler_step(spec, down, h, -dB);
      }
      acc += up[0] + down[0];
    }
    lx.push_back(std::log(h));
    ly.push_back(std::log(std::abs(acc / (2.0 * pairs) - mean_ref)));
  }
  const double slope = fit_slope(lx, ly);

  return {
      {"ou_mean", std::abs(mean - mean_ref) <= 3.0 * se_mean,
       "mean " + fmt(mean) + " ref " + fmt(mean_ref) + " se " + fmt(se_mean)},
      {"ou_variance", std::abs(var - var_ref) <= 3.0 * se_var,
       "var " + fmt(var) + " ref " + fmt(var_ref) + " se " + fmt(se_var)},
      {"euler_weak_order", slope >= 0.7 && slope <= 1.3, "mean-error log-log slope " + fmt(slope)},
  };
}

std::vector<CheckResult> check_continuity(std::uint64_t seed, int paths, std::ostream* csv) {
  RngStream rng(seed);
  continuity::PolicyModel model;
  model.mu = [](double s) { return 0.5 * std::tanh(s); };
  model.sigma = [](double s) { return 0.4 + 0.2 / (1.0 + std::exp(-s)); };
  const std::vector<int> lags{1, 2, 4, 8, 16};
  const double dt = 0.01;
  RngStream r1 = rng.split(1), r2 = rng.split(2);
  const auto sde_rep =
      continuity::continuity_scan(continuity::PolicyKind::IrlSde, model, 4.0, lags, dt, paths, r1);
  const auto wn_rep = continuity::continuity_scan(continuity::PolicyKind::WhiteNoiseGaussian,
                                                  model, 4.0, lags, dt, paths, r2);
  if (csv) {
    continuity::write_report_csv(*csv, sde_rep);
    std::ostringstream tail;
    continuity::write_report_csv(tail, wn_rep);
    const std::string body = tail.str();
    *csv << body.substr(body.find('\n') + 1);
  }
  return {
      {"sde_policy_slope", sde_rep.slope >= 1.5, "slope " + fmt(sde_rep.slope) + " (theory 2)"},
      {"white_noise_slope", wn_rep.slope <= 0.1, "slope " + fmt(wn_rep.slope) + " (theory 0)"},
  };
}

DriftFit fit_linear_drift(double theta, double sigma, double dt, int transitions,
                          std::uint64_t seed) {
  RngStream rng(seed);
  Batch batch;
  batch.dt = dt;
  batch.units.reserve(static_cast<std::size_t>(transitions));
  double s = sigma / std::sqrt(2.0 * theta) * rng.normal();
  const VectorXd zero = VectorXd::Zero(1);
  for (int k = 0; k < transitions; ++k) {
    const double next = s - theta * s * dt + sigma * std::sqrt(dt) * rng.normal();
    batch.units.push_back({VectorXd::Constant(1, s), zero, 0.0, VectorXd::Constant(1, next), zero, false});
    s = next;
  }

  HeadConfig hc;
  hc.state_dim = 1;
  hc.action_dim = 1;
  hc.hidden = {};
  hc.activation = net::Activation::Linear;
  auto heads = IrlHeads::zeros(hc);
  net::AdamState adam = net::AdamState::for_params(heads.ese.drift_net.params());
  const double schedule[] = {0.05, 0.005, 0.0005};
  for (double lr : schedule) {
    adam.config.learning_rate = lr;
    for (int it = 0; it < 300; ++it) {
      const auto res = obj::j_e_prime(batch, heads);
      net::adam_update(heads.ese.drift_net.params(), res.grads.f, adam);
    }
  }
  const auto& layer = heads.ese.drift_net.params().layers.front();
  return {layer.weight(0, 0), layer.bias[0], obj::girsanov_log_likelihood(batch, heads)};
}

std::vector<CheckResult> check_estimation(std::uint64_t seed, int seeds) {
  int hits = 0;
  std::ostringstream detail;
  detail.precision(3);
  for (int k = 0; k < seeds; ++k) {
    const auto fit = fit_linear_drift(0.5, 0.3, 0.05, 10000, splitmix64(seed + static_cast<std::uint64_t>(k)));
    if (std::abs(fit.slope + 0.5) <= 0.1) ++hits;
    detail << (k ? " " : "slopes ") << fit.slope;
  }
  const int need = (8 * seeds + 9) / 10;
  return {{"drift_slope_recovery", hits >= need,
           std::to_string(hits) + "/" + std::to_string(seeds) + " within 0.1; " + detail.str()}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gradients", "operators", "ou", "continuity",
                                              "estimation"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed, std::ostream* csv) {
  if (name == "gradients") return check_gradients(seed);
  if (name == "operators") return check_operators(seed);
  if (name == "ou") return check_ou(seed);
  if (name == "continuity") return check_continuity(seed, 10000, csv);
  if (name == "estimation") return check_estimation(seed);
  std::string valid;
  for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown check suite '" + name + "' (valid: " + valid + ")");
}

}  // namespace irl::checks
