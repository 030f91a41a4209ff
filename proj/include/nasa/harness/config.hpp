#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "nasa/agent.hpp"
#include "nasa/envs.hpp"

namespace nasa {

// Everything a run needs. Text form is flat `key = value` lines with `#`
// comments; unknown keys are rejected.
struct RunConfig {
  std::string env = "valve";  // valve | reacher
  ValveReset valve_reset = ValveReset::kRandom;
  double valve_max_step = 0.3;
  int episode_steps = 50;
  AgentConfig agent;
  std::size_t buffer_capacity = 100000;
  std::int64_t total_steps = 50000;
  std::int64_t warmup_steps = 1000;
  std::int64_t eval_every = 10000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";

  // Canonical text form; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
  void validate() const;
};

// Applies `key=value` pairs on top of `base`; throws on unknown keys or bad values.
RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& kv);
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

std::map<std::string, std::string> parse_key_values(const std::string& text);

std::unique_ptr<Environment> make_env(const RunConfig& cfg);
// Agent configuration with the action size of the configured environment.
AgentConfig resolved_agent_config(const RunConfig& cfg);

}  // namespace nasa
