#include "irl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "irl/errors.hpp"
#include "irl/sde.hpp"

namespace irl {

Optimizers Optimizers::for_heads(const IrlHeads& h, const TrainConfig& cfg) {
  auto adam = [](const net::DenseNet& n, double lr) {
    net::AdamConfig c;
    c.learning_rate = lr;
    return net::AdamState::for_params(n.params(), c);
  };
  return {adam(h.ve.q_net, cfg.lr_q), adam(h.ese.drift_net, cfg.lr_ese),
          adam(h.ese.diff_net, cfg.lr_ese), adam(h.apg.drift_net, cfg.lr_apg),
          adam(h.apg.diff_net, cfg.lr_apg)};
}

HeadConfig head_config_for(const TrainConfig& cfg, const env::EnvSpec& spec) {
  HeadConfig hc;
  hc.state_dim = spec.state_dim;
  hc.action_dim = spec.action_dim;
  hc.hidden.assign(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_units);
  hc.activation = net::activation_from_string(cfg.activation);
  const double range = (spec.a_max - spec.a_min).maxCoeff();
  hc.mu_max = cfg.mu_max > 0.0 ? cfg.mu_max : 2.0 * range / cfg.dt * 0.05;
  return hc;
}

obj::RangeBounds range_bounds(const env::EnvSpec& spec) {
  return {spec.s_min, spec.s_max, spec.a_min, spec.a_max};
}

EpisodeLog rollout_episode(const TrainConfig& cfg, const IrlHeads& heads,
                           const env::Environment& env, RngStream& rng, ReplayBuffer* buffer,
                           bool drift_only) {
  const env::EnvSpec& spec = env.bounds();
  RngStream env_rng = rng.split(1);
  RngStream action_rng = rng.split(2);  // independent of any environment noise
  RngStream storage_rng = rng.split(3);

  EpisodeLog log;
  env::EnvState state = env.reset(env_rng);
  Eigen::VectorXd a = Eigen::VectorXd::Constant(spec.action_dim, cfg.initial_action)
                          .cwiseMax(spec.a_min)
                          .cwiseMin(spec.a_max);
  const int steps = std::min(cfg.steps_per_episode, spec.max_steps);
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd s = state.s;
    const env::StepResult r = env.step(state, a);

    const ApgEval pol = apg_eval(heads.apg, s, a);
    const Eigen::VectorXd sigma =
        drift_only ? Eigen::VectorXd::Constant(spec.action_dim, heads.apg.eps) : pol.sigma_diag;
    const Eigen::VectorXd dB = sde::brownian_increment(action_rng, spec.action_dim, cfg.dt);
    Eigen::VectorXd a_next = a + pol.mu * cfg.dt + sigma.cwiseProduct(dB);
    if (!a_next.allFinite())
      throw NonFiniteError("rollout_episode: non-finite action at step " + std::to_string(k));
    const Eigen::VectorXd clipped = a_next.cwiseMax(spec.a_min).cwiseMin(spec.a_max);
    if (clipped != a_next) ++log.clipped_actions;

    log.steps.push_back({k * cfg.dt, s, a, r.reward});
    log.total_reward += r.reward;
    if (buffer != nullptr) {
      TrainingUnit unit{s, a, r.reward, r.next.s, clipped, r.next.terminated};
      if (cfg.sampling == SamplingMode::Bernoulli && cfg.bernoulli_gates_storage)
        buffer->push_gated(std::move(unit), storage_rng);
      else
        buffer->push(std::move(unit));
    }
    a = clipped;
    state = r.next;
    if (r.done) {
      log.terminated = r.next.terminated;
      break;
    }
  }
  return log;
}

Evaluation evaluate_objectives(const TrainConfig& cfg, const IrlHeads& heads,
                               const TargetSet& targets, const Batch& batch,
                               const env::EnvSpec& spec) {
  obj::LipschitzParams lip{cfg.lambda1, cfg.lambda2, cfg.d1, cfg.d2};
  // Zero-weight objectives are still reported but their gradients are skipped.
  auto jq = obj::j_q(batch, heads, targets, cfg.w_jq != 0.0);
  auto jqp = obj::j_q_prime(batch, heads, targets);
  auto je = obj::j_e(batch, heads, cfg.w_je != 0.0);
  auto jep = obj::j_e_prime(batch, heads);
  auto ja = obj::j_a(batch, heads, cfg.w_ja != 0.0);
  auto jap = obj::j_a_prime(batch, heads);
  auto [lip_p, lip_v] = obj::j_lip(heads, batch, lip);
  auto range = obj::j_range(batch, heads, range_bounds(spec), cfg.lambda_range);

  jq.report.weight = cfg.w_jq;
  jqp.report.weight = cfg.w_jq_prime;
  je.report.weight = cfg.w_je;
  jep.report.weight = cfg.w_je_prime;
  ja.report.weight = cfg.w_ja;
  jap.report.weight = cfg.w_ja_prime;

  Evaluation ev;
  ev.grads = HeadGradients::zeros_like(heads);
  for (const obj::ObjectiveResult* r : {&jq, &jqp, &je, &jep, &ja, &jap, &lip_p, &lip_v, &range}) {
    ev.losses.push_back(r->report);
    ev.grads.add_scaled(r->grads, r->report.weight);
  }
  return ev;
}

UpdateOutcome update_step(const TrainConfig& cfg, IrlHeads& heads, const TargetSet& targets,
                          Optimizers& opt, const ReplayBuffer& buffer, const env::EnvSpec& spec,
                          RngStream& rng) {
  if (buffer.empty()) throw StateError("update_step: replay buffer is empty");
  Batch batch;
  if (cfg.sampling == SamplingMode::Bernoulli && !cfg.bernoulli_gates_storage) {
    // Uniform candidates filtered by the reward-compressed admission probability.
    batch.dt = cfg.dt;
    batch.gamma = cfg.gamma;
    const auto target = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t tries = 0; batch.units.size() < target && tries < 100 * target; ++tries) {
      const auto& u = buffer.at(rng.uniform_index(buffer.size()));
      if (rng.bernoulli(buffer.admission_probability(u.reward))) batch.units.push_back(u);
    }
    if (batch.units.empty()) batch = buffer.sample_uniform(target, rng, cfg.dt, cfg.gamma);
  } else {
    batch = buffer.sample_uniform(static_cast<std::size_t>(cfg.batch_size), rng, cfg.dt,
                                  cfg.gamma);
  }

  Evaluation ev = evaluate_objectives(cfg, heads, targets, batch, spec);
  UpdateOutcome out;
  out.losses = std::move(ev.losses);

  // theta, theta_p and theta_v are stepped (or rejected) independently.
  auto step_group = [&](std::initializer_list<std::tuple<net::ParamSet*, const net::ParamSet*,
                                                         net::AdamState*>>
                            group) {
    for (const auto& [p, g, s] : group)
      if (!g->all_finite()) {
        ++out.rejected;
        return;
      }
    for (const auto& [p, g, s] : group) net::adam_update(*p, *g, *s);
  };
  step_group({{&heads.ve.q_net.params(), &ev.grads.q, &opt.q}});
  step_group({{&heads.ese.drift_net.params(), &ev.grads.f, &opt.f},
              {&heads.ese.diff_net.params(), &ev.grads.g, &opt.g}});
  step_group({{&heads.apg.drift_net.params(), &ev.grads.mu, &opt.mu},
              {&heads.apg.diff_net.params(), &ev.grads.sigma, &opt.sigma}});
  return out;
}

TrainResult train(const TrainConfig& cfg, const EpisodeCallback& on_episode) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto env = env::make_environment(cfg.env);
  const env::EnvSpec& spec = env->bounds();

  RngStream root(cfg.seed);
  RngStream init_rng = root.split(0x1);
  RngStream episode_root = root.split(0x2);
  RngStream update_root = root.split(0x3);

  TrainResult res;
  res.heads = IrlHeads::initialize(head_config_for(cfg, spec), init_rng);
  res.targets = res.heads;
  res.optimizers = Optimizers::for_heads(res.heads, cfg);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity), spec.state_dim,
                      spec.action_dim);

  for (int ep = 0; ep < cfg.max_episodes; ++ep) {
    if (!cfg.retain_buffer) {
      buffer.clear();
      res.events.emplace_back("release");
    }
    refresh_targets(res.heads, res.targets);
    res.events.emplace_back("refresh");

    RngStream ep_rng = episode_root.split(static_cast<std::uint64_t>(ep));
    const EpisodeLog log = rollout_episode(cfg, res.heads, *env, ep_rng, &buffer);
    res.events.emplace_back("rollout");

    CurveRow row;
    row.episode = ep;
    row.total_reward = log.total_reward;
    RngStream up_rng = update_root.split(static_cast<std::uint64_t>(ep));
    int updates = 0;
    for (int u = 0; u < cfg.updates_per_episode && !buffer.empty(); ++u) {
      const UpdateOutcome out = update_step(cfg, res.heads, res.targets, res.optimizers, buffer,
                                            spec, up_rng);
      for (int i = 0; i < kLossCount; ++i) row.losses[i] += out.losses[i].value;
      row.rejected_steps += out.rejected;
      ++updates;
    }
    if (updates > 0)
      for (double& l : row.losses) l /= updates;
    res.events.emplace_back("update");

    for (const net::DenseNet* n : {&res.heads.ve.q_net, &res.heads.ese.drift_net,
                                   &res.heads.ese.diff_net, &res.heads.apg.drift_net,
                                   &res.heads.apg.diff_net})
      if (!n->params().all_finite()) ++res.accepted_nonfinite;
    res.curve.push_back(row);
    if (on_episode) on_episode(row);
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

EvalSummary summarize(std::vector<double> totals) {
  EvalSummary s;
  s.totals = std::move(totals);
  const auto episodes = static_cast<double>(s.totals.size());
  double sum = 0.0;
  for (double t : s.totals) sum += t;
  s.mean = sum / static_cast<double>(episodes);
  double var = 0.0;
  for (double t : s.totals) var += (t - s.mean) * (t - s.mean);
  s.stddev = episodes > 1 ? std::sqrt(var / (episodes - 1)) : 0.0;
  return s;
}

}  // namespace

EvalSummary evaluate_policy(const TrainConfig& cfg, const IrlHeads& heads, int episodes,
                            std::uint64_t seed) {
  if (episodes <= 0) throw DomainError("evaluate_policy: episodes must be positive");
  const auto env = env::make_environment(cfg.env);
  RngStream root(seed);
  std::vector<double> totals;
  for (int e = 0; e < episodes; ++e) {
    RngStream r = root.split(static_cast<std::uint64_t>(e));
    totals.push_back(rollout_episode(cfg, heads, *env, r, nullptr, true).total_reward);
  }
  return summarize(std::move(totals));
}

EvalSummary evaluate_random_policy(const TrainConfig& cfg, int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw DomainError("evaluate_random_policy: episodes must be positive");
  const auto env = env::make_environment(cfg.env);
  const env::EnvSpec& spec = env->bounds();
  RngStream root(seed);
  std::vector<double> totals;
  for (int e = 0; e < episodes; ++e) {
    RngStream r = root.split(static_cast<std::uint64_t>(e));
    RngStream env_rng = r.split(1), action_rng = r.split(2);
    env::EnvState state = env->reset(env_rng);
    double total = 0.0;
    const int steps = std::min(cfg.steps_per_episode, spec.max_steps);
    for (int k = 0; k < steps && !state.done(); ++k) {
      Eigen::VectorXd a(spec.action_dim);
      for (int i = 0; i < spec.action_dim; ++i) a[i] = action_rng.uniform(spec.a_min[i], spec.a_max[i]);
      const env::StepResult res = env->step(state, a);
      total += res.reward;
      state = res.next;
    }
    totals.push_back(total);
  }
  return summarize(std::move(totals));
}

std::string curve_csv_header() {
  std::string h = "episode,total_reward";
  for (const char* n : kLossNames) h += std::string(",") + n;
  return h + ",rejected_steps";
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& curve) {
  os << curve_csv_header() << "\n";
  const auto old = os.precision(17);
  for (const auto& r : curve) {
    os << r.episode << "," << r.total_reward;
    for (double l : r.losses) os << "," << l;
    os << "," << r.rejected_steps << "\n";
  }
  os.precision(old);
}

void write_trajectory_csv(std::ostream& os, const EpisodeLog& log) {
  if (log.steps.empty()) {
    os << "t,R\n";
    return;
  }
  os << "t";
  for (Eigen::Index i = 0; i < log.steps.front().s.size(); ++i) os << ",s" << i;
  for (Eigen::Index i = 0; i < log.steps.front().a.size(); ++i) os << ",a" << i;
  os << ",R\n";
  const auto old = os.precision(17);
  for (const auto& st : log.steps) {
    os << st.t;
    for (double v : st.s) os << "," << v;
    for (double v : st.a) os << "," << v;
    os << "," << st.reward << "\n";
  }
  os.precision(old);
}

nlohmann::json checkpoint_json(const TrainConfig& cfg, const IrlHeads& heads,
                               const TargetSet& targets, const Optimizers& opt, int episodes) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << cfg.hash();
  return {{"format", "irl.checkpoint"},
          {"version", 1},
          {"config_hash", hash.str()},
          {"config", cfg.to_map()},
          {"episodes", episodes},
          {"heads", heads},
          {"targets", targets},
          {"optimizers",
           {{"q", opt.q}, {"f", opt.f}, {"g", opt.g}, {"mu", opt.mu}, {"sigma", opt.sigma}}}};
}

void save_checkpoint(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << doc.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "irl.checkpoint" || j.value("version", 0) != 1)
    throw ConfigError("'" + path + "' is not an irl.checkpoint v1 document");
  Checkpoint c;
  for (const auto& [k, v] : j.at("config").items()) c.config.set(k, v.get<std::string>());
  c.heads = j.at("heads").get<IrlHeads>();
  c.targets = j.at("targets").get<IrlHeads>();
  const auto& o = j.at("optimizers");
  c.optimizers = {o.at("q").get<net::AdamState>(), o.at("f").get<net::AdamState>(),
                  o.at("g").get<net::AdamState>(), o.at("mu").get<net::AdamState>(),
                  o.at("sigma").get<net::AdamState>()};
  c.episodes = j.at("episodes").get<int>();
  return c;
}

}  // namespace irl
