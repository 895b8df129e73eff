#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "irl/adam.hpp"
#include "irl/errors.hpp"
#include "irl/objectives.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using irl::Batch;
using irl::HeadConfig;
using irl::IrlHeads;
using irl::RngStream;
using irl::TrainingUnit;
using irl::net::Activation;
using irl::net::DenseNet;
namespace obj = irl::obj;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double softplus_inverse(double y) { return std::log(std::expm1(y)); }

// Heads with no hidden layer: every net is act(W y + b), easy to hand-set.
HeadConfig affine_config(double mu_max = 1.0) {
  HeadConfig c;
  c.state_dim = 1;
  c.action_dim = 1;
  c.hidden = {};
  c.activation = Activation::Linear;
  c.mu_max = mu_max;
  return c;
}

void set_bias(DenseNet& net, double b) { net.params().layers.back().bias[0] = b; }

TrainingUnit unit(double s, double a, double r, double s_next, double a_next, bool done = false) {
  return {vec({s}), vec({a}), r, vec({s_next}), vec({a_next}), done};
}

Batch batch_of(std::vector<TrainingUnit> units, double dt = 0.05, double gamma = 0.6) {
  Batch b;
  b.units = std::move(units);
  b.dt = dt;
  b.gamma = gamma;
  return b;
}

IrlHeads random_heads(RngStream& rng) {
  HeadConfig c;
  c.state_dim = 1;
  c.action_dim = 1;
  c.hidden = {1 + static_cast<int>(rng.uniform_index(5))};
  c.activation = rng.bernoulli(0.5) ? Activation::Sigmoid : Activation::Tanh;
  c.mu_max = rng.uniform(0.5, 3.0);
  auto h = IrlHeads::initialize(c, rng);
  for (DenseNet* n :
       {&h.ese.drift_net, &h.ese.diff_net, &h.apg.drift_net, &h.apg.diff_net, &h.ve.q_net}) {
    auto flat = n->params().flatten();
    for (double& p : flat) p += 0.5 * rng.normal();
    n->params().assign(flat);
  }
  return h;
}

Batch random_batch(RngStream& rng, int size) {
  std::vector<TrainingUnit> units;
  for (int k = 0; k < size; ++k)
    units.push_back(unit(rng.normal(), rng.normal(), rng.normal(), rng.normal(), rng.normal(),
                         rng.bernoulli(0.2)));
  return batch_of(std::move(units), rng.uniform(0.02, 0.2), rng.uniform(0.3, 0.95));
}

enum class Slot { Q, F, G, Mu, Sigma };

DenseNet& net_of(IrlHeads& h, Slot s) {
  switch (s) {
    case Slot::Q: return h.ve.q_net;
    case Slot::F: return h.ese.drift_net;
    case Slot::G: return h.ese.diff_net;
    case Slot::Mu: return h.apg.drift_net;
    case Slot::Sigma: return h.apg.diff_net;
  }
  return h.ve.q_net;
}

const irl::net::ParamSet& grad_of(const irl::HeadGradients& g, Slot s) {
  switch (s) {
    case Slot::Q: return g.q;
    case Slot::F: return g.f;
    case Slot::G: return g.g;
    case Slot::Mu: return g.mu;
    case Slot::Sigma: return g.sigma;
  }
  return g.q;
}

// Norm-wise relative error between an analytic gradient slot and central
// differences of `value` over that net's parameters.
double fd_relative_error(const IrlHeads& heads, Slot slot, const irl::HeadGradients& grads,
                         const std::function<double(const IrlHeads&)>& value, double h = 1e-6) {
  IrlHeads probe = heads;
  const auto flat = net_of(probe, slot).params().flatten();
  const auto analytic = grad_of(grads, slot).flatten();
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto p = flat;
    const double step = h * std::max(1.0, std::abs(flat[i]));
    p[i] = flat[i] + step;
    net_of(probe, slot).params().assign(p);
    const double up = value(probe);
    p[i] = flat[i] - step;
    net_of(probe, slot).params().assign(p);
    const double fd = (up - value(probe)) / (2 * step);
    diff += (fd - analytic[i]) * (fd - analytic[i]);
    ref += fd * fd;
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-10);
}

bool all_zero(const irl::net::ParamSet& p) { return p.norm() == 0.0; }

}  // namespace

TEST_CASE("J_Q vanishes for a zero value net and zero rewards") {
  RngStream rng(1);
  auto h = random_heads(rng);
  for (auto& l : h.ve.q_net.params().layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  auto b = random_batch(rng, 6);
  for (auto& u : b.units) u.reward = 0.0;
  CHECK(obj::j_q(b, h, random_heads(rng)).report.value == 0.0);
}

TEST_CASE("J_Q is zero on a residual-free instance") {
  // Q = w s + c, target drift f = f0, mu = 0: residual r + ln(g) Q + f0 w = 0.
  auto h = IrlHeads::zeros(affine_config());
  h.ve.q_net.params().layers[0].weight(0, 0) = 1.4;
  set_bias(h.ve.q_net, 0.3);
  set_bias(h.ese.drift_net, -0.3);
  const double s = 0.7, gamma = 0.6, dt = 0.05;
  const double q = 1.4 * s + 0.3;
  const double generator = -0.3 * 1.4;
  const double reward_step = -(std::log(gamma) * q + generator) * dt;
  const auto b = batch_of({unit(s, 0.1, reward_step, 0.0, 0.0)}, dt, gamma);
  CHECK(obj::j_q(b, h, h).report.value < 1e-20);
}

TEST_CASE("J_Q value matches an operator-level oracle") {
  RngStream rng(2);
  const auto h = random_heads(rng);
  const auto t = random_heads(rng);
  const auto b = random_batch(rng, 5);
  double expected = 0.0;
  for (const auto& u : b.units) {
    const auto e = irl::ese_eval(t.ese, u.s, u.a);
    const auto p = irl::apg_eval(t.apg, u.s, u.a);
    const auto d = irl::q_eval_with_derivs(h.ve, u.s, u.a);
    const VectorXd g = irl::join(e.g_diag, p.sigma_diag);
    const MatrixXd ggt = g.cwiseAbs2().asDiagonal();
    const double res = u.reward / b.dt + irl::sde::apply_L(b.gamma, d.q, irl::join(e.f, p.mu),
                                                          ggt, d.grad, d.hess);
    expected += res * res;
  }
  CHECK(obj::j_q(b, h, t).report.value == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("J_Q trains only the value net") {
  RngStream rng(3);
  const auto h = random_heads(rng);
  const auto r = obj::j_q(random_batch(rng, 4), h, random_heads(rng));
  CHECK(r.report.name == "J_Q");
  CHECK(r.grads.q.norm() > 0.0);
  CHECK(all_zero(r.grads.f));
  CHECK(all_zero(r.grads.g));
  CHECK(all_zero(r.grads.mu));
  CHECK(all_zero(r.grads.sigma));
  CHECK(r.report.grad_norm == doctest::Approx(r.grads.norm()));
}

TEST_CASE("value-only evaluation keeps the value and skips the gradient") {
  RngStream rng(31);
  const auto h = random_heads(rng);
  const auto t = random_heads(rng);
  const auto b = random_batch(rng, 5);
  const obj::ObjectiveResult pairs[][2] = {{obj::j_q(b, h, t), obj::j_q(b, h, t, false)},
                                           {obj::j_e(b, h), obj::j_e(b, h, false)},
                                           {obj::j_a(b, h), obj::j_a(b, h, false)}};
  for (const auto& [full, value_only] : pairs) {
    CHECK(value_only.report.value == full.report.value);
    CHECK(full.report.grad_norm > 0.0);
    CHECK(value_only.grads.norm() == 0.0);
    CHECK(value_only.report.grad_norm == 0.0);
  }
}

TEST_CASE("J_Q' examples") {
  auto h = IrlHeads::zeros(affine_config());
  const auto b0 = batch_of({unit(0.3, 0.2, 0.0, 0.5, 0.1)});
  CHECK(obj::j_q_prime(b0, h, h).report.value == 0.0);

  set_bias(h.ve.q_net, 1.0);
  const double expected = std::pow(1.0 - std::pow(0.6, 0.05), 2);
  CHECK(obj::j_q_prime(b0, h, h).report.value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::pow(0.6, 0.05) == doctest::Approx(0.9748).epsilon(1e-4));

  // A terminal unit drops the bootstrap term.
  const auto done = batch_of({unit(0.3, 0.2, 0.0, 0.5, 0.1, true)});
  CHECK(obj::j_q_prime(done, h, h).report.value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("J_Q' vanishes on a two-state Bellman-consistent table") {
  // Q(s) = w s + c on states {0, 1}; rewards chosen so the discrete Bellman identity holds.
  auto h = IrlHeads::zeros(affine_config());
  h.ve.q_net.params().layers[0].weight(0, 0) = -2.5;
  set_bias(h.ve.q_net, 4.0);
  const double dt = 0.05, gamma = 0.6, disc = std::pow(gamma, dt);
  const double q0 = 4.0, q1 = 1.5;
  const auto b = batch_of({unit(0.0, 0.0, q0 - disc * q1, 1.0, 0.0),
                           unit(1.0, 0.0, q1 - disc * q0, 0.0, 0.0)},
                          dt, gamma);
  CHECK(obj::j_q_prime(b, h, h).report.value < 1e-28);
}

TEST_CASE("J_Q' bootstraps from the target net") {
  auto h = IrlHeads::zeros(affine_config());
  auto t = h;
  set_bias(t.ve.q_net, 2.0);
  const auto b = batch_of({unit(0.0, 0.0, 0.0, 0.0, 0.0)});
  const double disc = std::pow(0.6, 0.05);
  CHECK(obj::j_q_prime(b, h, t).report.value == doctest::Approx(4.0 * disc * disc));
}

TEST_CASE("J_E examples") {
  auto h = IrlHeads::zeros(affine_config());
  const auto b = batch_of({unit(0.5, 0.5, 0.0, 0.5, 0.5)});
  CHECK(obj::j_e(b, h).report.value == 0.0);
  set_bias(h.ese.drift_net, 0.2);
  set_bias(h.ese.diff_net, softplus_inverse(0.5 - 1e-3));
  CHECK(obj::j_e(b, h).report.value == doctest::Approx(0.004).epsilon(1e-12));
}

TEST_CASE("J_E is invariant under joint scaling of f and g") {
  RngStream rng(4);
  auto h = IrlHeads::zeros(affine_config());
  h.ese.drift_net.params().layers[0].weight << 0.7, -0.4;
  set_bias(h.ese.drift_net, 0.1);
  const double g0 = 0.6;
  set_bias(h.ese.diff_net, softplus_inverse(g0 - 1e-3));
  const auto b = random_batch(rng, 8);
  const double base = obj::j_e(b, h).report.value;
  for (double c : {0.5, 2.0}) {
    auto scaled = h;
    scaled.ese.drift_net.params() *= c;
    set_bias(scaled.ese.diff_net, softplus_inverse(c * g0 - 1e-3));
    CHECK(obj::j_e(b, scaled).report.value == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("J_E' examples") {
  auto h = IrlHeads::zeros(affine_config());
  set_bias(h.ese.drift_net, 0.2);
  const auto exact = batch_of({unit(1.0, 0.0, 0.0, 1.0 + 0.2 * 0.05, 0.0)});
  CHECK(obj::j_e_prime(exact, h).report.value < 1e-30);
  const auto off = batch_of({unit(1.0, 0.0, 0.0, 1.02, 0.0)});
  CHECK(obj::j_e_prime(off, h).report.value == doctest::Approx(1e-4).epsilon(1e-10));
}

TEST_CASE("J_A examples") {
  auto h = IrlHeads::zeros(affine_config());
  set_bias(h.ve.q_net, 2.0);
  set_bias(h.apg.drift_net, std::atanh(0.3));
  set_bias(h.apg.diff_net, softplus_inverse(0.5 - 1e-3));
  const double dt = 0.05, mu = 0.3;
  const auto zero_noise = batch_of({unit(0.0, 0.0, 0.0, 0.0, mu * dt)}, dt);
  CHECK(obj::j_a(zero_noise, h).report.value < 1e-28);
  const auto b = batch_of({unit(0.0, 0.0, 0.0, 0.0, mu * dt + 0.01)}, dt);
  CHECK(obj::j_a(b, h).report.value == doctest::Approx(0.008).epsilon(1e-10));
}

TEST_CASE("J_A' examples") {
  // Q depends on s only: both action derivatives vanish.
  auto h = IrlHeads::zeros(affine_config());
  h.ve.q_net.params().layers[0].weight << 3.0, 0.0;
  set_bias(h.apg.drift_net, std::atanh(0.3));
  const auto b = batch_of({unit(0.4, 0.0, 0.0, 0.0, 0.0)});
  CHECK(std::abs(obj::j_a_prime(b, h).report.value) < 1e-12);

  // Q(a) = -0.5 softplus(-4 a): dQ/da = 1 and d2Q/da2 = -2 at a = 0.
  HeadConfig c = affine_config();
  c.hidden = {1};
  c.activation = Activation::Softplus;
  auto h2 = IrlHeads::zeros(c);
  h2.ve.q_net.params().layers[0].weight << 0.0, -4.0;
  h2.ve.q_net.params().layers[1].weight << -0.5;
  set_bias(h2.apg.drift_net, std::atanh(0.3));
  set_bias(h2.apg.diff_net, softplus_inverse(0.5 - 1e-3));
  const auto d = irl::q_eval_with_derivs(h2.ve, vec({0.4}), vec({0.0}));
  CHECK(d.grad[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.hess(1, 1) == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK(obj::j_a_prime(b, h2).report.value == doctest::Approx(-0.05).epsilon(1e-7));
}

TEST_CASE("descending J_A' on Q = -a^2 points the drift toward a = 0") {
  // -(softplus(2a) + softplus(-2a)) is even, concave and peaks at a = 0, like -a^2.
  HeadConfig c = affine_config(2.0);
  c.hidden = {2};
  c.activation = Activation::Softplus;
  auto h = IrlHeads::zeros(c);
  h.ve.q_net.params().layers[0].weight << 0.0, 2.0, 0.0, -2.0;
  h.ve.q_net.params().layers[1].weight << -1.0, -1.0;
  std::vector<TrainingUnit> units;
  for (double a : {-1.5, -0.8, -0.3, 0.3, 0.8, 1.5}) units.push_back(unit(0.0, a, 0.0, 0.0, a));
  const auto b = batch_of(units);
  irl::net::AdamState st = irl::net::AdamState::for_params(h.apg.drift_net.params(), {0.05});
  for (int it = 0; it < 300; ++it) {
    const auto r = obj::j_a_prime(b, h);
    irl::net::adam_update(h.apg.drift_net.params(), r.grads.mu, st);
  }
  for (double a : {-1.5, -0.8, -0.3, 0.3, 0.8, 1.5}) {
    const double mu = irl::apg_eval(h.apg, vec({0.0}), vec({a})).mu[0];
    CHECK(mu * a < 0.0);
  }
}

TEST_CASE("J_Lip examples") {
  RngStream rng(5);
  const auto h = random_heads(rng);
  const auto b = random_batch(rng, 4);
  const auto [p, v] = obj::j_lip(h, b, {0.01, 0.01, 1e6, 1e6});
  CHECK(p.report.value == 0.0);
  CHECK(v.report.value == 0.0);
  CHECK(p.report.name == "J_Lip_p");
  CHECK(v.report.name == "J_Lip_v");

  const auto z = IrlHeads::zeros(affine_config());
  const auto [pz, vz] = obj::j_lip(z, b, {0.01, 0.01, 0.0, 0.0});
  CHECK(pz.report.value == 0.0);
  CHECK(vz.report.value == 0.0);

  // f = 2 s: Jacobian norm 2, g constant; three units, D = 1, lambda = 0.1.
  auto lin = IrlHeads::zeros(affine_config());
  lin.ese.drift_net.params().layers[0].weight << 2.0, 0.0;
  const auto b3 = batch_of({unit(0.1, 0.0, 0, 0, 0), unit(0.2, 0.0, 0, 0, 0),
                            unit(-0.3, 0.5, 0, 0, 0)});
  const auto [p3, v3] = obj::j_lip(lin, b3, {0.1, 0.1, 1.0, 1.0});
  CHECK(p3.report.value == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(v3.report.value == 0.0);
}

TEST_CASE("J_Range examples") {
  auto h = IrlHeads::zeros(affine_config(8.0));
  obj::RangeBounds bounds{vec({-1.0}), vec({1.0}), vec({-1.0}), vec({1.0})};
  const auto inside = batch_of({unit(0.2, 0.3, 0, 0, 0), unit(-0.5, -0.9, 0, 0, 0)});
  CHECK(obj::j_range(inside, h, bounds, 1.0).report.value == 0.0);

  // a + mu dt = 0.9 + 4 * 0.05 = 1.1: overshoot 0.1.
  set_bias(h.apg.drift_net, std::atanh(0.5));
  const auto over = batch_of({unit(0.0, 0.9, 0, 0, 0)});
  const auto r = obj::j_range(over, h, bounds, 1.0);
  CHECK(r.report.value == doctest::Approx(0.01).epsilon(1e-12));
  // Descent lowers the mu bias.
  CHECK(r.grads.mu.layers.back().bias[0] > 0.0);
  CHECK(all_zero(r.grads.f));
  CHECK(all_zero(r.grads.q));

  obj::RangeBounds bad{vec({-1.0, 0.0}), vec({1.0}), vec({-1.0}), vec({1.0})};
  CHECK_THROWS_AS(obj::j_range(over, h, bad, 1.0), irl::ShapeError);
}

TEST_CASE("property: analytic gradients match finite differences across 25 seeds") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    CAPTURE(seed);
    RngStream rng = RngStream(900).split(seed);
    const auto h = random_heads(rng);
    const auto t = random_heads(rng);
    const auto b = random_batch(rng, 4);

    const auto jq = obj::j_q(b, h, t);
    CHECK(fd_relative_error(h, Slot::Q, jq.grads,
                            [&](const IrlHeads& x) { return obj::j_q(b, x, t).report.value; }) <
          1e-4);

    const auto jqp = obj::j_q_prime(b, h, t);
    CHECK(fd_relative_error(h, Slot::Q, jqp.grads, [&](const IrlHeads& x) {
            return obj::j_q_prime(b, x, t).report.value;
          }) < 1e-4);

    const auto je = obj::j_e(b, h);
    for (Slot s : {Slot::F, Slot::G})
      CHECK(fd_relative_error(h, s, je.grads,
                              [&](const IrlHeads& x) { return obj::j_e(b, x).report.value; }) <
            1e-4);

    const auto jep = obj::j_e_prime(b, h);
    CHECK(fd_relative_error(h, Slot::F, jep.grads, [&](const IrlHeads& x) {
            return obj::j_e_prime(b, x).report.value;
          }) < 1e-4);

    const auto ja = obj::j_a(b, h);
    for (Slot s : {Slot::Mu, Slot::Sigma})
      CHECK(fd_relative_error(h, s, ja.grads,
                              [&](const IrlHeads& x) { return obj::j_a(b, x).report.value; }) <
            1e-4);

    const auto jap = obj::j_a_prime(b, h);
    for (Slot s : {Slot::Mu, Slot::Sigma})
      CHECK(fd_relative_error(h, s, jap.grads, [&](const IrlHeads& x) {
              return obj::j_a_prime(b, x).report.value;
            }) < 1e-4);

    const obj::LipschitzParams lp{0.3, 0.3, 0.0, 0.0};
    const auto [lip_p, lip_v] = obj::j_lip(h, b, lp);
    for (Slot s : {Slot::F, Slot::G})
      CHECK(fd_relative_error(h, s, lip_p.grads, [&](const IrlHeads& x) {
              return obj::j_lip(x, b, lp).first.report.value;
            }) < 1e-4);
    for (Slot s : {Slot::Mu, Slot::Sigma})
      CHECK(fd_relative_error(h, s, lip_v.grads, [&](const IrlHeads& x) {
              return obj::j_lip(x, b, lp).second.report.value;
            }) < 1e-4);

    const obj::RangeBounds tight{vec({-0.2}), vec({0.2}), vec({-0.2}), vec({0.2})};
    const auto jr = obj::j_range(b, h, tight, 0.7);
    CHECK(fd_relative_error(h, Slot::Mu, jr.grads, [&](const IrlHeads& x) {
            return obj::j_range(b, x, tight, 0.7).report.value;
          }) < 1e-4);
  }
}

TEST_CASE("property: objectives are non-negative and never mutate the heads") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng = RngStream(77).split(seed);
    const auto h = random_heads(rng);
    const auto t = random_heads(rng);
    const auto b = random_batch(rng, 6);
    const auto before = irl::parameter_hash(h);
    CHECK(obj::j_q(b, h, t).report.value >= 0.0);
    CHECK(obj::j_q_prime(b, h, t).report.value >= 0.0);
    CHECK(obj::j_e(b, h).report.value >= 0.0);
    CHECK(obj::j_e_prime(b, h).report.value >= 0.0);
    const auto [p, v] = obj::j_lip(h, b, {0.1, 0.1, 0.5, 0.5});
    CHECK(p.report.value >= 0.0);
    CHECK(v.report.value >= 0.0);
    CHECK(obj::j_range(b, h, {vec({-0.5}), vec({0.5}), vec({-0.5}), vec({0.5})}, 1.0)
              .report.value >= 0.0);
    obj::j_a_prime(b, h);
    obj::girsanov_log_likelihood(b, h);

    bool q_nonneg = true;
    for (const auto& u : b.units) q_nonneg = q_nonneg && irl::q_eval_with_derivs(h.ve, u.s, u.a).q >= 0;
    const double ja = obj::j_a(b, h).report.value;
    if (q_nonneg) CHECK(ja >= 0.0);
    CHECK(irl::parameter_hash(h) == before);
  }
}

TEST_CASE("minimizing J_E alone shrinks the drift-to-noise ratio") {
  // Synthetic data from dX = -0.5 X dt + 0.3 dB.
  RngStream rng(8);
  const double dt = 0.05;
  std::vector<TrainingUnit> units;
  double x = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double next = x - 0.5 * x * dt + 0.3 * std::sqrt(dt) * rng.normal();
    units.push_back(unit(x, 0.0, 0.0, next, 0.0));
    x = next;
  }
  const auto b = batch_of(units, dt);
  RngStream init(9);
  HeadConfig c = affine_config();
  c.hidden = {8};
  c.activation = Activation::Tanh;
  auto h = IrlHeads::initialize(c, init);
  const double start = obj::j_e(b, h).report.value;
  auto sf = irl::net::AdamState::for_params(h.ese.drift_net.params(), {0.01});
  auto sg = irl::net::AdamState::for_params(h.ese.diff_net.params(), {0.01});
  for (int it = 0; it < 200; ++it) {
    const auto r = obj::j_e(b, h);
    irl::net::adam_update(h.ese.drift_net.params(), r.grads.f, sf);
    irl::net::adam_update(h.ese.diff_net.params(), r.grads.g, sg);
  }
  CHECK(obj::j_e(b, h).report.value < 0.1 * start);
}

TEST_CASE("the Girsanov likelihood prefers the true drift sign on the visited region") {
  RngStream rng(10);
  const double dt = 0.05, theta = 0.5, sigma = 0.3;
  std::vector<TrainingUnit> units;
  double x = 1.0;
  for (int k = 0; k < 5000; ++k) {
    const double next = x - theta * x * dt + sigma * std::sqrt(dt) * rng.normal();
    units.push_back(unit(x, 0.0, 0.0, next, 0.0));
    x = next;
  }
  const auto b = batch_of(units, dt);
  auto with_slope = [&](double w) {
    auto h = IrlHeads::zeros(affine_config());
    h.ese.drift_net.params().layers[0].weight << w, 0.0;
    set_bias(h.ese.diff_net, softplus_inverse(sigma - 1e-3));
    return obj::girsanov_log_likelihood(b, h);
  };
  const double truth = with_slope(-theta);
  CHECK(truth > with_slope(0.0));
  CHECK(truth > with_slope(theta));
}

TEST_CASE("objectives reject inconsistent batches") {
  const auto h = IrlHeads::zeros(affine_config());
  Batch empty;
  CHECK_THROWS_AS(obj::j_e(empty, h), irl::StateError);
  Batch wide;
  wide.units.push_back({vec({1.0, 2.0}), vec({0.0}), 0.0, vec({1.0, 2.0}), vec({0.0}), false});
  CHECK_THROWS_AS(obj::j_e_prime(wide, h), irl::ShapeError);
  auto b = batch_of({unit(0, 0, 0, 0, 0)});
  b.units[0].reward = INFINITY;
  CHECK_THROWS_AS(obj::j_q_prime(b, h, h), irl::NonFiniteError);
}
