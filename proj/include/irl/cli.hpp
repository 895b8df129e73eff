#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irl/config.hpp"

namespace irl::cli {

struct Command {
  std::string subcommand;  // train | eval | check | export
  std::string suite;       // check only
  std::string config_path;
  std::optional<std::string> env;
  std::optional<int> episodes;  // train: max_episodes; eval: evaluation episodes
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> overrides;  // --set, applied last
  std::string out_dir;     // empty: $IRL_OUT_DIR, then "."
  std::string checkpoint;  // eval / export input
};

/// Throws ConfigError on malformed arguments.
Command parse(int argc, const char* const* argv);

/// Layering: checkpoint config (if any), config file, flags, then --set pairs.
TrainConfig resolve_config(const Command& cmd);
std::string resolve_out_dir(const Command& cmd);

/// 0 on success, 2 on configuration errors, 1 on runtime failures or failed checks.
int run(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse + run with the same exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace irl::cli
