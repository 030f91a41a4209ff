#include "nasa/harness/trainer.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "nasa/nn/checkpoint.hpp"

namespace nasa {

EvalResult evaluate_policy(Environment& env, int episodes, int frame_stack, Rng& rng, const Policy& policy) {
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  EvalResult out;
  for (int e = 0; e < episodes; ++e) {
    FrameStack s = stack_reset(env.reset(rng), frame_stack);
    double ret = 0;
    for (;;) {
      const std::vector<float> a = policy(s);
      EnvStep st = env.step(a);
      ret += st.r_ext;
      if (st.done) break;
      s = stack_push(s, st.observation);
    }
    out.returns.push_back(ret);
  }
  double sum = 0;
  for (double r : out.returns) sum += r;
  out.mean_return = sum / episodes;
  double var = 0;
  for (double r : out.returns) var += (r - out.mean_return) * (r - out.mean_return);
  out.return_stddev = std::sqrt(var / episodes);
  return out;
}

EvalResult evaluate(const Agent& agent, Environment& env, int episodes, Rng& rng) {
  Rng unused(0);
  return evaluate_policy(env, episodes, agent.config().obs.stack, rng,
                         [&](const FrameStack& s) { return agent.select_action(s, false, unused); });
}

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const Agent& agent) {
  auto tensors = agent.state_tensors();
  tensors.push_back({"meta.config", nn::bytes_to_tensor(cfg.to_text())});
  nn::write_tensors(path, tensors);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const auto tensors = nn::read_tensors(path);
  const nn::Tensor<float>* config = nullptr;
  for (const auto& t : tensors) {
    if (t.name == "meta.config") config = &t.tensor;
  }
  if (!config) throw std::runtime_error("checkpoint " + path.string() + " has no meta.config");
  LoadedCheckpoint out;
  out.config = parse_config(nn::tensor_to_bytes(*config));
  out.config.validate();
  Rng init(0);
  out.agent = std::make_unique<Agent>(resolved_agent_config(out.config), init, 0);
  out.agent->load_state_tensors(tensors);
  return out;
}

namespace {

std::unique_ptr<Agent> build_agent(const RunConfig& cfg, const RngStreams& streams) {
  Rng init = streams.stream("agent-init");
  const std::uint64_t noise_seed = streams.stream("target-noise").next_u64();
  return std::make_unique<Agent>(resolved_agent_config(cfg), init, noise_seed);
}

}  // namespace

Trainer::Trainer(RunConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      env_(make_env(cfg_)),
      eval_env_(make_env(cfg_)),
      agent_(build_agent(cfg_, RngStreams(cfg_.seed))),
      buffer_(cfg_.buffer_capacity),
      env_rng_(RngStreams(cfg_.seed).stream("env")),
      explore_rng_(RngStreams(cfg_.seed).stream("exploration")),
      sampling_rng_(RngStreams(cfg_.seed).stream("sampling")),
      eval_rng_(RngStreams(cfg_.seed).stream("eval")) {}

StepRow Trainer::step() {
  if (!episode_active_) {
    stack_ = stack_reset(env_->reset(env_rng_), cfg_.agent.obs.stack);
    episode_active_ = true;
  }
  std::vector<float> action;
  if (step_ < cfg_.warmup_steps) {
    action.resize(std::size_t(env_->action_dim()));
    for (auto& a : action) a = float(explore_rng_.uniform(-1.0, 1.0));
  } else {
    action = agent_->select_action(stack_, true, explore_rng_);
  }
  EnvStep es = env_->step(action);
  FrameStack next = stack_push(stack_, es.observation);
  const RewardBreakdown reward = agent_->compose_reward(stack_, action, next, es.r_ext);
  buffer_.push(Transition{stack_, action, reward.r_total, reward, next, es.done});

  StepRow row;
  row.step = step_;
  row.r_ext = reward.r_ext;
  row.r_novel = reward.r_novel;
  row.r_surprise = reward.r_surprise;
  if (step_ >= cfg_.warmup_steps) {
    const TickResult tick = agent_->train_tick(buffer_, sampling_rng_);
    if (!tick.warming_up) {
      row.ae_loss = tick.ae_loss;
      row.critic_loss = tick.critic_loss;
      row.predictor_loss = tick.predictor_loss;
      if (tick.actor_updates > 0) last_actor_loss_ = tick.actor_loss;
    }
  }
  row.actor_loss = last_actor_loss_;

  stack_ = std::move(next);
  if (es.done) episode_active_ = false;
  ++step_;
  return row;
}

EvalResult Trainer::run_eval() { return evaluate(*agent_, *eval_env_, cfg_.eval_episodes, eval_rng_); }

void Trainer::run(const std::function<void(const EvalRow&)>& on_eval) {
  MetricsWriter writer(cfg_.out_dir);
  while (step_ < cfg_.total_steps) {
    writer.write(step());
    if (step_ % cfg_.eval_every == 0) {
      const EvalResult e = run_eval();
      const EvalRow row{step_, e.mean_return, e.return_stddev};
      writer.write(row);
      if (on_eval) on_eval(row);
      save_checkpoint(checkpoint_path(), cfg_, *agent_);
    }
  }
  save_checkpoint(checkpoint_path(), cfg_, *agent_);
}

}  // namespace nasa
