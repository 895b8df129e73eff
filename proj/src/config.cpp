#include "irl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "irl/envs.hpp"
#include "irl/errors.hpp"
#include "irl/tensor_net.hpp"

namespace irl {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string valid_key_list() {
  std::string out;
  for (const auto& k : TrainConfig::keys()) out += (out.empty() ? "" : ", ") + k;
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                      std::string(v) + "'");
  }
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" +
                      std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" +
                    std::string(v) + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::string name;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define IRL_DOUBLE(name)                                                                    \
  Field{#name, [](TrainConfig& c, std::string_view v) { c.name = parse_double(#name, v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }}
#define IRL_INT(name)                                                                     \
  Field{#name, [](TrainConfig& c, std::string_view v) { c.name = parse_int<int>(#name, v); }, \
        [](const TrainConfig& c) { return std::to_string(c.name); }}
#define IRL_BOOL(name)                                                                     \
  Field{#name, [](TrainConfig& c, std::string_view v) { c.name = parse_bool(#name, v); }, \
        [](const TrainConfig& c) { return std::string(c.name ? "true" : "false"); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      Field{"env", [](TrainConfig& c, std::string_view v) { c.env = std::string(v); },
            [](const TrainConfig& c) { return c.env; }},
      IRL_DOUBLE(dt),
      IRL_DOUBLE(gamma),
      IRL_INT(steps_per_episode),
      IRL_INT(max_episodes),
      IRL_INT(batch_size),
      IRL_INT(updates_per_episode),
      IRL_INT(buffer_capacity),
      IRL_BOOL(retain_buffer),
      Field{"sampling",
            [](TrainConfig& c, std::string_view v) {
              if (v == "uniform")
                c.sampling = SamplingMode::Uniform;
              else if (v == "bernoulli")
                c.sampling = SamplingMode::Bernoulli;
              else
                throw ConfigError("config key 'sampling': expected uniform or bernoulli");
            },
            [](const TrainConfig& c) {
              return std::string(c.sampling == SamplingMode::Uniform ? "uniform" : "bernoulli");
            }},
      IRL_BOOL(bernoulli_gates_storage),
      IRL_DOUBLE(lr_q),
      IRL_DOUBLE(lr_ese),
      IRL_DOUBLE(lr_apg),
      IRL_DOUBLE(w_jq),
      IRL_DOUBLE(w_jq_prime),
      IRL_DOUBLE(w_je),
      IRL_DOUBLE(w_je_prime),
      IRL_DOUBLE(w_ja),
      IRL_DOUBLE(w_ja_prime),
      IRL_DOUBLE(lambda1),
      IRL_DOUBLE(lambda2),
      IRL_DOUBLE(lambda_range),
      IRL_DOUBLE(d1),
      IRL_DOUBLE(d2),
      IRL_INT(hidden_layers),
      IRL_INT(hidden_units),
      Field{"activation", [](TrainConfig& c, std::string_view v) { c.activation = std::string(v); },
            [](const TrainConfig& c) { return c.activation; }},
      IRL_DOUBLE(mu_max),
      IRL_DOUBLE(initial_action),
      Field{"seed",
            [](TrainConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      IRL_INT(eval_episodes),
  };
  return f;
}

#undef IRL_DOUBLE
#undef IRL_INT
#undef IRL_BOOL

}  // namespace

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.name);
    return out;
  }();
  return k;
}

void TrainConfig::set(std::string_view key, std::string_view value) {
  const std::string k = trim(key);
  for (const auto& f : fields()) {
    if (f.name == k) {
      f.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + k + "'; valid keys: " + valid_key_list());
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("invalid config: " + m); };
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (steps_per_episode < 1) fail("steps_per_episode must be >= 1");
  if (max_episodes < 0) fail("max_episodes must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (updates_per_episode < 0) fail("updates_per_episode must be >= 0");
  if (buffer_capacity < 1) fail("buffer_capacity must be >= 1");
  if (hidden_layers < 0 || hidden_units < 1) fail("hidden architecture must be positive");
  if (eval_episodes < 1) fail("eval_episodes must be >= 1");
  for (double w : {lr_q, lr_ese, lr_apg, w_jq, w_jq_prime, w_je, w_je_prime, w_ja, w_ja_prime,
                   lambda1, lambda2, lambda_range, d1, d2})
    if (!(w >= 0.0)) fail("learning rates, weights and penalty constants must be >= 0");
  (void)net::activation_from_string(activation);
  (void)env::make_environment(env);
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.name + " = " + f.get(*this) + "\n";
  return out;
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  std::map<std::string, std::string> m;
  for (const auto& f : fields()) m[f.name] = f.get(*this);
  return m;
}

std::uint64_t TrainConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void TrainConfig::apply_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash_pos = line.find('#'); hash_pos != std::string::npos) line.resize(hash_pos);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set(std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
  }
}

void TrainConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_text(ss.str());
}

TrainConfig TrainConfig::from_text(std::string_view text) {
  TrainConfig cfg;
  cfg.apply_text(text);
  return cfg;
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  TrainConfig cfg;
  cfg.apply_file(path);
  return cfg;
}

}  // namespace irl
