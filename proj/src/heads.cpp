#include "irl/heads.hpp"

#include <bit>
#include <cmath>
#include <nlohmann/json.hpp>

#include "irl/errors.hpp"

namespace irl {

using net::Activation;
using net::DenseNet;

namespace {

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

void check_config(const HeadConfig& cfg) {
  if (cfg.state_dim <= 0 || cfg.action_dim <= 0)
    throw ShapeError("HeadConfig: state and action dims must be positive");
  if (!(cfg.mu_max > 0.0)) throw DomainError("HeadConfig: mu_max must be positive");
  if (!(cfg.eps_g > 0.0) || !(cfg.eps_sigma > 0.0))
    throw DomainError("HeadConfig: diffusion floors must be positive");
}

void check_sa(const Eigen::VectorXd& s, const Eigen::VectorXd& a, int n, int m) {
  require_shape(s.size() == n && a.size() == m,
                "head evaluation: expected state dim " + std::to_string(n) + " and action dim " +
                    std::to_string(m));
}

}  // namespace

IrlHeads IrlHeads::initialize(const HeadConfig& cfg, RngStream& rng) {
  check_config(cfg);
  const int n = cfg.state_dim;
  const int m = cfg.action_dim;
  const int in = n + m;
  IrlHeads h;
  h.state_dim = n;
  h.action_dim = m;
  RngStream r_f = rng.split(1), r_g = rng.split(2), r_mu = rng.split(3), r_s = rng.split(4),
            r_q = rng.split(5);
  h.ese.drift_net = DenseNet::glorot(layer_dims(in, cfg.hidden, n), cfg.activation,
                                     Activation::Linear, r_f);
  h.ese.diff_net = DenseNet::glorot(layer_dims(in, cfg.hidden, n), cfg.activation,
                                    Activation::Softplus, r_g);
  h.ese.eps = cfg.eps_g;
  h.apg.drift_net = DenseNet::glorot(layer_dims(in, cfg.hidden, m), cfg.activation,
                                     Activation::Tanh, r_mu);
  h.apg.diff_net = DenseNet::glorot(layer_dims(in, cfg.hidden, m), cfg.activation,
                                    Activation::Softplus, r_s);
  h.apg.mu_max = cfg.mu_max;
  h.apg.eps = cfg.eps_sigma;
  h.ve.q_net = DenseNet::glorot(layer_dims(in, cfg.hidden, 1), cfg.activation,
                                Activation::Linear, r_q);
  return h;
}

IrlHeads IrlHeads::zeros(const HeadConfig& cfg) {
  check_config(cfg);
  const int n = cfg.state_dim;
  const int m = cfg.action_dim;
  const int in = n + m;
  IrlHeads h;
  h.state_dim = n;
  h.action_dim = m;
  h.ese.drift_net = DenseNet(layer_dims(in, cfg.hidden, n), cfg.activation, Activation::Linear);
  h.ese.diff_net = DenseNet(layer_dims(in, cfg.hidden, n), cfg.activation, Activation::Softplus);
  h.ese.eps = cfg.eps_g;
  h.apg.drift_net = DenseNet(layer_dims(in, cfg.hidden, m), cfg.activation, Activation::Tanh);
  h.apg.diff_net = DenseNet(layer_dims(in, cfg.hidden, m), cfg.activation, Activation::Softplus);
  h.apg.mu_max = cfg.mu_max;
  h.apg.eps = cfg.eps_sigma;
  h.ve.q_net = DenseNet(layer_dims(in, cfg.hidden, 1), cfg.activation, Activation::Linear);
  return h;
}

bool IrlHeads::operator==(const IrlHeads& o) const {
  return state_dim == o.state_dim && action_dim == o.action_dim &&
         ese.drift_net == o.ese.drift_net && ese.diff_net == o.ese.diff_net &&
         ese.eps == o.ese.eps && apg.drift_net == o.apg.drift_net &&
         apg.diff_net == o.apg.diff_net && apg.mu_max == o.apg.mu_max && apg.eps == o.apg.eps &&
         ve.q_net == o.ve.q_net;
}

void refresh_targets(const IrlHeads& heads, TargetSet& targets) { targets = heads; }

std::uint64_t parameter_hash(const IrlHeads& h) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      hash ^= (bits >> (8 * i)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const DenseNet* n : {&h.ese.drift_net, &h.ese.diff_net, &h.apg.drift_net,
                            &h.apg.diff_net, &h.ve.q_net})
    for (double v : n->params().flatten()) mix(v);
  mix(h.ese.eps);
  mix(h.apg.mu_max);
  mix(h.apg.eps);
  return hash;
}

HeadGradients HeadGradients::zeros_like(const IrlHeads& h) {
  return {h.ve.q_net.zeros_like(), h.ese.drift_net.zeros_like(), h.ese.diff_net.zeros_like(),
          h.apg.drift_net.zeros_like(), h.apg.diff_net.zeros_like()};
}

void HeadGradients::add_scaled(const HeadGradients& o, double s) {
  q.add_scaled(o.q, s);
  f.add_scaled(o.f, s);
  g.add_scaled(o.g, s);
  mu.add_scaled(o.mu, s);
  sigma.add_scaled(o.sigma, s);
}

double HeadGradients::norm() const {
  return std::sqrt(q.squared_norm() + f.squared_norm() + g.squared_norm() + mu.squared_norm() +
                   sigma.squared_norm());
}

bool HeadGradients::all_finite() const {
  return q.all_finite() && f.all_finite() && g.all_finite() && mu.all_finite() &&
         sigma.all_finite();
}

Eigen::VectorXd join(const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
  Eigen::VectorXd y(s.size() + a.size());
  y << s, a;
  return y;
}

EseEval ese_eval(const EseHead& head, const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
  const int n = head.drift_net.output_dim();
  check_sa(s, a, n, head.drift_net.input_dim() - n);
  const Eigen::VectorXd y = join(s, a);
  return {head.drift_net.forward(y), head.diff_net.forward(y).array() + head.eps};
}

ApgEval apg_eval(const ApgHead& head, const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
  const int m = head.drift_net.output_dim();
  check_sa(s, a, head.drift_net.input_dim() - m, m);
  const Eigen::VectorXd y = join(s, a);
  return {head.mu_max * head.drift_net.forward(y), head.diff_net.forward(y).array() + head.eps};
}

QDerivatives q_eval_with_derivs(const VeHead& head, const Eigen::VectorXd& s,
                                const Eigen::VectorXd& a) {
  require_shape(s.size() + a.size() == head.q_net.input_dim(),
                "q_eval_with_derivs: joint input dimension mismatch");
  const Eigen::VectorXd y = join(s, a);
  return {head.q_net.forward(y)[0], head.q_net.input_gradient(y, 0),
          head.q_net.input_hessian(y, 0)};
}

sde::DiffusionSpec merged_spec(const EseHead& ese, const ApgHead& apg, int state_dim,
                               int action_dim) {
  require_shape(ese.drift_net.output_dim() == state_dim &&
                    apg.drift_net.output_dim() == action_dim &&
                    ese.drift_net.input_dim() == state_dim + action_dim,
                "merged_spec: head dimensions disagree with (n, m)");
  const int n = state_dim;
  const int m = action_dim;
  sde::DiffusionSpec spec;
  spec.dim = n + m;
  spec.drift = [&ese, &apg, n, m](const Eigen::VectorXd& y) {
    const Eigen::VectorXd s = y.head(n), a = y.tail(m);
    return join(ese_eval(ese, s, a).f, apg_eval(apg, s, a).mu);
  };
  spec.diffusion = [&ese, &apg, n, m](const Eigen::VectorXd& y) {
    const Eigen::VectorXd s = y.head(n), a = y.tail(m);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + m, n + m);
    g.diagonal() << ese_eval(ese, s, a).g_diag, apg_eval(apg, s, a).sigma_diag;
    return g;
  };
  return spec;
}

void to_json(nlohmann::json& j, const IrlHeads& h) {
  j = {{"state_dim", h.state_dim},       {"action_dim", h.action_dim},
       {"ese_drift", h.ese.drift_net},    {"ese_diffusion", h.ese.diff_net},
       {"ese_eps", h.ese.eps},            {"apg_drift", h.apg.drift_net},
       {"apg_diffusion", h.apg.diff_net}, {"apg_mu_max", h.apg.mu_max},
       {"apg_eps", h.apg.eps},            {"q", h.ve.q_net}};
}

void from_json(const nlohmann::json& j, IrlHeads& h) {
  h.state_dim = j.at("state_dim").get<int>();
  h.action_dim = j.at("action_dim").get<int>();
  h.ese.drift_net = j.at("ese_drift").get<DenseNet>();
  h.ese.diff_net = j.at("ese_diffusion").get<DenseNet>();
  h.ese.eps = j.at("ese_eps").get<double>();
  h.apg.drift_net = j.at("apg_drift").get<DenseNet>();
  h.apg.diff_net = j.at("apg_diffusion").get<DenseNet>();
  h.apg.mu_max = j.at("apg_mu_max").get<double>();
  h.apg.eps = j.at("apg_eps").get<double>();
  h.ve.q_net = j.at("q").get<DenseNet>();
}

}  // namespace irl
