#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nasa/agent.hpp"
#include "nasa/envs.hpp"
#include "nasa/harness/config.hpp"
#include "nasa/harness/metrics.hpp"
#include "nasa/replay.hpp"

namespace nasa {

struct EvalResult {
  double mean_return = 0;
  double return_stddev = 0;
  std::vector<double> returns;
};

using Policy = std::function<std::vector<float>(const FrameStack&)>;

// Runs full episodes with `policy` and reports extrinsic returns only.
// The population standard deviation is reported.
EvalResult evaluate_policy(Environment& env, int episodes, int frame_stack, Rng& rng, const Policy& policy);
// Deterministic (explore off) episodes of a frozen agent.
EvalResult evaluate(const Agent& agent, Environment& env, int episodes, Rng& rng);

// Agent checkpoint: agent state tensors plus the run configuration.
void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const Agent& agent);
struct LoadedCheckpoint {
  RunConfig config;
  std::unique_ptr<Agent> agent;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// The synchronous collection/training loop: one environment step, online
// reward composition, buffer push, then one train_tick.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg);

  // Runs to total_steps, writing metrics and checkpoints under out_dir.
  // `on_eval` is called after each evaluation row is written.
  void run(const std::function<void(const EvalRow&)>& on_eval = {});
  // One environment step (plus training once warm-up is over).
  StepRow step();
  // Evaluates the current agent with the eval stream and eval environment.
  EvalResult run_eval();

  const RunConfig& config() const { return cfg_; }
  Agent& agent() { return *agent_; }
  const Agent& agent() const { return *agent_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::int64_t steps_done() const { return step_; }
  std::filesystem::path checkpoint_path() const { return cfg_.out_dir / "checkpoint.bin"; }

 private:
  RunConfig cfg_;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<Environment> eval_env_;
  std::unique_ptr<Agent> agent_;
  ReplayBuffer buffer_;
  Rng env_rng_, explore_rng_, sampling_rng_, eval_rng_;
  FrameStack stack_;
  bool episode_active_ = false;
  std::int64_t step_ = 0;
  double last_actor_loss_ = 0;
};

}  // namespace nasa
