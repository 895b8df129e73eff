#include "irl/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "irl/checks.hpp"
#include "irl/errors.hpp"
#include "irl/trainer.hpp"

namespace irl::cli {
namespace {

namespace fs = std::filesystem;

void build_app(CLI::App& app, Command& cmd, std::vector<std::string>& sets) {
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", cmd.config_path, "key = value config file");
    sub->add_option("--env", cmd.env, "pendulum | mountaincar | cartpole | cartpole-discrete");
    sub->add_option("--episodes", cmd.episodes, "training or evaluation episodes");
    sub->add_option("--steps", cmd.steps, "steps per episode");
    sub->add_option("--seed", cmd.seed, "root seed");
    sub->add_option("--out", cmd.out_dir, "output directory (default $IRL_OUT_DIR, then .)");
    sub->add_option("--set", sets, "config override key=value (repeatable)");
  };
  common(app.add_subcommand("train", "train all heads, write curve.csv and checkpoint.json"));
  auto* eval = app.add_subcommand("eval", "drift-only evaluation, write eval.csv");
  common(eval);
  eval->add_option("--checkpoint", cmd.checkpoint, "checkpoint.json (default: untrained heads)");
  auto* check = app.add_subcommand("check", "run a verification suite");
  common(check);
  check->add_option("suite", cmd.suite, "gradients | operators | ou | continuity | estimation | all");
  auto* exp = app.add_subcommand("export", "write trajectory.csv and buffer.csv for one episode");
  common(exp);
  exp->add_option("--checkpoint", cmd.checkpoint, "checkpoint.json (default: untrained heads)");
}

void finish_parse(CLI::App& app, Command& cmd, const std::vector<std::string>& sets) {
  cmd.subcommand = app.get_subcommands().front()->get_name();
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    cmd.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

fs::path prepare_out(const Command& cmd) {
  const fs::path dir = resolve_out_dir(cmd);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  return os;
}

int do_train(const Command& cmd, std::ostream& out) {
  const TrainConfig cfg = resolve_config(cmd);
  const fs::path dir = prepare_out(cmd);
  open_out(dir / "config.txt") << cfg.to_text();
  const TrainResult res = train(cfg, [&](const CurveRow& row) {
    if (row.episode % 10 == 0 || row.episode + 1 == cfg.max_episodes)
      out << "episode " << row.episode << " total_reward " << row.total_reward
          << " rejected_steps " << row.rejected_steps << "\n";
  });
  {
    auto os = open_out(dir / "curve.csv");
    write_curve_csv(os, res.curve);
  }
  save_checkpoint((dir / "checkpoint.json").string(),
                  checkpoint_json(cfg, res.heads, res.targets, res.optimizers, cfg.max_episodes));
  out << "wrote " << (dir / "curve.csv").string() << " and " << (dir / "checkpoint.json").string()
      << "\n";
  if (res.accepted_nonfinite > 0) {
    out << "non-finite parameters after " << res.accepted_nonfinite << " updates\n";
    return 1;
  }
  return 0;
}

// Heads from the checkpoint, or freshly initialized from the config seed.
IrlHeads heads_for(const Command& cmd, const TrainConfig& cfg) {
  const auto env = env::make_environment(cfg.env);
  const HeadConfig hc = head_config_for(cfg, env->bounds());
  if (cmd.checkpoint.empty()) {
    RngStream init = RngStream(cfg.seed).split(0x1);
    return IrlHeads::initialize(hc, init);
  }
  IrlHeads heads = load_checkpoint(cmd.checkpoint).heads;
  if (heads.state_dim != hc.state_dim || heads.action_dim != hc.action_dim)
    throw ConfigError("checkpoint dimensions do not match environment '" + cfg.env + "'");
  return heads;
}

int do_eval(const Command& cmd, std::ostream& out) {
  const TrainConfig cfg = resolve_config(cmd);
  const int episodes = cmd.episodes.value_or(cfg.eval_episodes);
  const IrlHeads heads = heads_for(cmd, cfg);
  const fs::path dir = prepare_out(cmd);
  const std::uint64_t eval_seed = splitmix64(cfg.seed ^ 0xe7a1ULL);
  const EvalSummary policy = evaluate_policy(cfg, heads, episodes, eval_seed);
  const EvalSummary random = evaluate_random_policy(cfg, episodes, eval_seed);
  {
    auto os = open_out(dir / "eval.csv");
    os << "episode,total_reward,random_total_reward\n";
    os.precision(17);
    for (int e = 0; e < episodes; ++e)
      os << e << "," << policy.totals[static_cast<std::size_t>(e)] << ","
         << random.totals[static_cast<std::size_t>(e)] << "\n";
  }
  out << "policy mean " << policy.mean << " std " << policy.stddev << "\n";
  out << "random_baseline mean " << random.mean << " std " << random.stddev << "\n";
  return 0;
}

int do_check(const Command& cmd, std::ostream& out) {
  const std::uint64_t seed = cmd.seed.value_or(0);
  std::vector<std::string> suites;
  if (cmd.suite.empty() || cmd.suite == "all")
    suites = checks::suite_names();
  else
    suites = {cmd.suite};
  for (const auto& s : suites) {
    bool known = false;
    for (const auto& n : checks::suite_names()) known = known || n == s;
    if (!known) checks::run_suite(s, seed);  // throws ConfigError listing the valid names
  }
  const fs::path dir = prepare_out(cmd);
  bool all_ok = true;
  for (const auto& s : suites) {
    std::ostringstream csv;
    const auto results = checks::run_suite(s, seed, s == "continuity" ? &csv : nullptr);
    if (s == "continuity") open_out(dir / "continuity.csv") << csv.str();
    for (const auto& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << s << "." << r.name << ": " << r.detail << "\n";
      all_ok = all_ok && r.passed;
    }
  }
  out << (all_ok ? "all checks passed" : "some checks failed") << "\n";
  return all_ok ? 0 : 1;
}

int do_export(const Command& cmd, std::ostream& out) {
  const TrainConfig cfg = resolve_config(cmd);
  const IrlHeads heads = heads_for(cmd, cfg);
  const auto env = env::make_environment(cfg.env);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity), env->bounds().state_dim,
                      env->bounds().action_dim);
  RngStream rng = RngStream(cfg.seed).split(0x4);
  const EpisodeLog log = rollout_episode(cfg, heads, *env, rng, &buffer);
  const fs::path dir = prepare_out(cmd);
  {
    auto os = open_out(dir / "trajectory.csv");
    write_trajectory_csv(os, log);
  }
  {
    auto os = open_out(dir / "buffer.csv");
    buffer.dump_csv(os);
  }
  out << "wrote " << log.steps.size() << " steps to " << (dir / "trajectory.csv").string()
      << " and " << (dir / "buffer.csv").string() << "\n";
  return 0;
}

}  // namespace

Command parse(int argc, const char* const* argv) {
  CLI::App app{"irl"};
  Command cmd;
  std::vector<std::string> sets;
  build_app(app, cmd, sets);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  finish_parse(app, cmd, sets);
  return cmd;
}

TrainConfig resolve_config(const Command& cmd) {
  TrainConfig cfg;
  if (!cmd.checkpoint.empty()) cfg = load_checkpoint(cmd.checkpoint).config;
  if (!cmd.config_path.empty()) cfg.apply_file(cmd.config_path);
  if (cmd.env) cfg.env = *cmd.env;
  if (cmd.subcommand != "eval" && cmd.episodes) cfg.max_episodes = *cmd.episodes;
  if (cmd.steps) cfg.steps_per_episode = *cmd.steps;
  if (cmd.seed) cfg.seed = *cmd.seed;
  for (const auto& [k, v] : cmd.overrides) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

std::string resolve_out_dir(const Command& cmd) {
  if (!cmd.out_dir.empty()) return cmd.out_dir;
  if (const char* env = std::getenv("IRL_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.subcommand == "train") return do_train(cmd, out);
    if (cmd.subcommand == "eval") return do_eval(cmd, out);
    if (cmd.subcommand == "check") return do_check(cmd, out);
    if (cmd.subcommand == "export") return do_export(cmd, out);
    throw ConfigError("unknown subcommand '" + cmd.subcommand +
                      "' (valid: train, eval, check, export)");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"irl: continuous-time actor-critic with SDE policies"};
  Command cmd;
  std::vector<std::string> sets;
  build_app(app, cmd, sets);
  try {
    app.parse(argc, argv);
    finish_parse(app, cmd, sets);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  return run(cmd, out, err);
}

}  // namespace irl::cli
