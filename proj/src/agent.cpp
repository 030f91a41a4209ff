#include "nasa/agent.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nasa {

using nn::Tensor;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kNasaTd3: return "nasa-td3";
    case Variant::kAeTd3: return "ae-td3";
    case Variant::kPixelTd3: return "pixel-td3";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "nasa-td3") return Variant::kNasaTd3;
  if (name == "ae-td3") return Variant::kAeTd3;
  if (name == "pixel-td3") return Variant::kPixelTd3;
  throw std::invalid_argument("unknown variant '" + name + "' (expected nasa-td3, ae-td3 or pixel-td3)");
}

int AgentConfig::feature_dim() const { return uses_autoencoder() ? z_dim : int(obs.element_count()); }

std::vector<nn::LayerSpec> actor_specs(int feature_dim, int hidden, int action_dim) {
  using nn::LayerSpec;
  return {LayerSpec::dense(feature_dim, hidden), LayerSpec::relu(), LayerSpec::dense(hidden, hidden),
          LayerSpec::relu(), LayerSpec::dense(hidden, action_dim), LayerSpec::tanh()};
}

std::vector<nn::LayerSpec> critic_specs(int feature_dim, int hidden, int action_dim) {
  using nn::LayerSpec;
  return {LayerSpec::dense(feature_dim + action_dim, hidden), LayerSpec::relu(), LayerSpec::dense(hidden, hidden),
          LayerSpec::relu(), LayerSpec::dense(hidden, 1)};
}

namespace {

AutoencoderConfig autoencoder_config(const AgentConfig& cfg) {
  AutoencoderConfig ae;
  ae.obs = cfg.obs;
  ae.z_dim = cfg.z_dim;
  ae.filters = cfg.ae_filters;
  ae.encoder_optim.lr = cfg.lr_encoder;
  ae.decoder_optim.lr = cfg.lr_decoder;
  return ae;
}

PredictorConfig predictor_config(const AgentConfig& cfg) {
  PredictorConfig p;
  p.z_dim = cfg.z_dim;
  p.action_dim = cfg.action_dim;
  p.hidden = cfg.predictor_hidden;
  p.members = cfg.ensemble_size;
  p.optim.lr = cfg.lr_predictor;
  return p;
}

void check_batch(const Batch& b) {
  if (b.actions.rank() != 2 || b.actions.dim(0) == 0) throw std::invalid_argument("empty batch");
}

}  // namespace

Agent::Agent(const AgentConfig& cfg, Rng& init_rng, std::uint64_t noise_seed) : cfg_(cfg), noise_rng_(noise_seed) {
  if (cfg.action_dim < 1) throw std::invalid_argument("action_dim must be >= 1");
  if (cfg.hyper.updates_per_step < 1) throw std::invalid_argument("updates_per_step (G) must be >= 1");
  if (cfg.hyper.policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
  if (cfg.hyper.policy_delay > cfg.hyper.updates_per_step) {
    throw std::invalid_argument("policy_delay must not exceed updates_per_step (G), or the actor never updates");
  }
  if (cfg.hyper.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(cfg.hyper.gamma >= 0 && cfg.hyper.gamma < 1)) throw std::invalid_argument("gamma must be in [0,1)");
  if (cfg.uses_autoencoder()) ae_.emplace(autoencoder_config(cfg), init_rng);
  if (cfg.uses_intrinsic()) predictor_.emplace(predictor_config(cfg), init_rng);
  const int fd = cfg.feature_dim();
  actor_ = nn::Network<float>(actor_specs(fd, cfg.actor_hidden, cfg.action_dim), {fd}, init_rng);
  critic1_ = nn::Network<float>(critic_specs(fd, cfg.critic_hidden, cfg.action_dim), {fd + cfg.action_dim}, init_rng);
  critic2_ = nn::Network<float>(critic_specs(fd, cfg.critic_hidden, cfg.action_dim), {fd + cfg.action_dim}, init_rng);
  target_actor_ = actor_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;
  actor_opt_ = nn::Adam<float>(actor_, {cfg.lr_actor});
  critic1_opt_ = nn::Adam<float>(critic1_, {cfg.lr_critic});
  critic2_opt_ = nn::Adam<float>(critic2_, {cfg.lr_critic});
}

Tensor<float> Agent::features(const Tensor<float>& obs) const {
  if (ae_) return ae_->encode_batch(obs);
  if (obs.rank() != 4 || obs.row_size() != cfg_.obs.element_count()) {
    throw std::invalid_argument("observation batch " + nn::shape_to_string(obs.shape()) +
                                " does not match the configured observation");
  }
  return obs.reshaped({obs.dim(0), cfg_.feature_dim()});
}

std::vector<float> Agent::select_action(const FrameStack& s, bool explore, Rng& rng) const {
  std::vector<float> a = actor_.infer(features(to_tensor(s))).values();
  if (explore) {
    for (auto& v : a) v = std::clamp(float(v + cfg_.hyper.explore_sigma * rng.normal()), -1.f, 1.f);
  }
  return a;
}

Tensor<float> Agent::td_target(const Batch& batch, Tensor<float>* noise_out) {
  check_batch(batch);
  const int n = batch.size();
  const Tensor<float> z_next = features(batch.next_obs);
  Tensor<float> a_next = target_actor_.infer(z_next);
  Tensor<float> noise(a_next.shape());
  for (std::size_t i = 0; i < a_next.size(); ++i) {
    const double eps = std::clamp(cfg_.hyper.target_noise_sigma * noise_rng_.normal(), -cfg_.hyper.noise_clip,
                                  cfg_.hyper.noise_clip);
    noise[i] = float(eps);
    a_next[i] = std::clamp(a_next[i] + noise[i], -1.f, 1.f);
  }
  if (noise_out) *noise_out = noise;
  const Tensor<float> in = nn::concat_features(z_next, a_next);
  const Tensor<float> q1 = target_critic1_.infer(in);
  const Tensor<float> q2 = target_critic2_.infer(in);
  Tensor<float> y({n, 1});
  for (int i = 0; i < n; ++i) {
    if (batch.done[i] != 0.f) {
      y[i] = batch.rewards[i];
    } else {
      y[i] = float(double(batch.rewards[i]) + cfg_.hyper.gamma * double(std::min(q1[i], q2[i])));
    }
  }
  return y;
}

double Agent::ae_update(const Batch& batch) {
  check_batch(batch);
  if (!ae_) throw std::logic_error("ae_update on a variant without an autoencoder");
  return ae_->update(batch.obs);
}

double Agent::critic_update(const Batch& batch) {
  check_batch(batch);
  const Tensor<float> y = td_target(batch);
  const int fd = cfg_.feature_dim();
  const Tensor<float> z = ae_ ? ae_->encoder().forward(batch.obs) : features(batch.obs);
  const Tensor<float> in = nn::concat_features(z, batch.actions);
  const Tensor<float> q1 = critic1_.forward(in);
  const Tensor<float> q2 = critic2_.forward(in);
  Tensor<float> g1, g2;
  const double loss = mse_with_grad(q1, y, &g1) + mse_with_grad(q2, y, &g2);
  const Tensor<float> d1 = critic1_.backward(g1, true);
  const Tensor<float> d2 = critic2_.backward(g2, true);
  if (ae_) {
    Tensor<float> dz = nn::slice_features(d1, 0, fd);
    const Tensor<float> dz2 = nn::slice_features(d2, 0, fd);
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += dz2[i];
    ae_->encoder().backward(dz);
    ae_->encoder_optimizer().step(ae_->encoder());
  }
  critic1_opt_.step(critic1_);
  critic2_opt_.step(critic2_);
  return loss;
}

double Agent::actor_update(const Batch& batch) {
  check_batch(batch);
  const int n = batch.size(), fd = cfg_.feature_dim();
  const Tensor<float> z = features(batch.obs);
  const Tensor<float> a = actor_.forward(z);
  const Tensor<float> q = critic1_.forward(nn::concat_features(z, a));
  double mean_q = 0;
  for (int i = 0; i < n; ++i) mean_q += q[i];
  mean_q /= n;
  const Tensor<float> dq({n, 1}, -1.f / float(n));
  const Tensor<float> d_in = critic1_.backward(dq, false);
  actor_.backward(nn::slice_features(d_in, fd, cfg_.action_dim));
  actor_opt_.step(actor_);
  return -mean_q;
}

double Agent::predictor_update(const Batch& batch) {
  check_batch(batch);
  if (!predictor_) throw std::logic_error("predictor_update on a variant without a predictor ensemble");
  return predictor_->update(features(batch.obs), batch.actions, features(batch.next_obs));
}

void Agent::target_sync(double tau) {
  nn::polyak_update(target_actor_, actor_, tau);
  nn::polyak_update(target_critic1_, critic1_, tau);
  nn::polyak_update(target_critic2_, critic2_, tau);
}

TickResult Agent::train_tick(const ReplayBuffer& buffer, Rng& sampling_rng) {
  TickResult out;
  const auto& h = cfg_.hyper;
  if (buffer.size() < std::size_t(h.batch_size)) {
    out.warming_up = true;
    return out;
  }
  for (int g = 0; g < h.updates_per_step; ++g) {
    const Batch batch = buffer.sample(std::size_t(h.batch_size), sampling_rng);
    if (ae_) out.ae_loss += ae_update(batch);
    out.critic_loss += critic_update(batch);
    ++out.critic_updates;
    if (predictor_) out.predictor_loss += predictor_update(batch);
    ++iterations_;
    if ((g + 1) % h.policy_delay == 0) {
      out.actor_loss += actor_update(batch);
      ++out.actor_updates;
      target_sync(h.tau);
    }
  }
  out.ae_loss /= h.updates_per_step;
  out.critic_loss /= h.updates_per_step;
  out.predictor_loss /= h.updates_per_step;
  if (out.actor_updates > 0) out.actor_loss /= out.actor_updates;
  return out;
}

RewardBreakdown Agent::compose_reward(const FrameStack& s, std::span<const float> a, const FrameStack& s_next,
                                      double r_ext) const {
  if (!cfg_.uses_intrinsic()) {
    RewardBreakdown b;
    b.r_ext = r_ext;
    b.r_total = r_ext;
    return b;
  }
  const Latent z = ae_->encode(s);
  const double r_novel = novelty_from_reconstruction(s, ae_->decode(z), cfg_.ssim, cfg_.clamp_ssim);
  const double r_surprise = surprise_reward(*predictor_, z, a, ae_->encode(s_next));
  return total_reward(cfg_.weights, r_ext, r_novel, r_surprise);
}

namespace {

struct NetRef {
  std::string prefix;
  const nn::Network<float>* net;
  const nn::Adam<float>* opt;
};

void append_net(std::vector<nn::NamedTensor>& out, const NetRef& ref) {
  const auto names = ref.net->param_names();
  const auto params = ref.net->params();
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back({ref.prefix + "." + names[i], params[i]->value});
  if (ref.opt) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.push_back({"adam." + ref.prefix + ".m." + names[i], ref.opt->first_moments()[i]});
      out.push_back({"adam." + ref.prefix + ".v." + names[i], ref.opt->second_moments()[i]});
    }
    out.push_back({"adam." + ref.prefix + ".t", nn::bytes_to_tensor(std::to_string(ref.opt->steps()))});
  }
}

using TensorLookup = std::map<std::string, const Tensor<float>*>;

const Tensor<float>& lookup(const TensorLookup& map, const std::string& name, const nn::Shape* shape) {
  auto it = map.find(name);
  if (it == map.end()) throw std::runtime_error("checkpoint is missing tensor '" + name + "'");
  if (shape && it->second->shape() != *shape) {
    throw std::runtime_error("checkpoint tensor '" + name + "' has shape " + nn::shape_to_string(it->second->shape()) +
                             ", expected " + nn::shape_to_string(*shape));
  }
  return *it->second;
}

std::int64_t lookup_int(const TensorLookup& map, const std::string& name) {
  const std::string text = nn::tensor_to_bytes(lookup(map, name, nullptr));
  try {
    return std::stoll(text);
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint tensor '" + name + "' is not an integer");
  }
}

void load_net(const TensorLookup& map, const std::string& prefix, nn::Network<float>& net, nn::Adam<float>* opt) {
  const auto names = net.param_names();
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i]->value = lookup(map, prefix + "." + names[i], &params[i]->value.shape());
    params[i]->grad.fill(0.f);
  }
  if (opt) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      opt->first_moments()[i] = lookup(map, "adam." + prefix + ".m." + names[i], &params[i]->value.shape());
      opt->second_moments()[i] = lookup(map, "adam." + prefix + ".v." + names[i], &params[i]->value.shape());
    }
    opt->set_steps(lookup_int(map, "adam." + prefix + ".t"));
  }
}

}  // namespace

std::vector<nn::NamedTensor> Agent::state_tensors() const {
  std::vector<nn::NamedTensor> out;
  if (ae_) {
    append_net(out, {"enc", &ae_->encoder(), &ae_->encoder_optimizer()});
    append_net(out, {"dec", &ae_->decoder(), &ae_->decoder_optimizer()});
  }
  append_net(out, {"actor", &actor_, &actor_opt_});
  append_net(out, {"critic1", &critic1_, &critic1_opt_});
  append_net(out, {"critic2", &critic2_, &critic2_opt_});
  append_net(out, {"target.actor", &target_actor_, nullptr});
  append_net(out, {"target.critic1", &target_critic1_, nullptr});
  append_net(out, {"target.critic2", &target_critic2_, nullptr});
  if (predictor_) {
    for (std::size_t m = 0; m < predictor_->size(); ++m) {
      append_net(out, {"pred." + std::to_string(m), &predictor_->member(m), &predictor_->optimizer(m)});
    }
  }
  out.push_back({"meta.iterations", nn::bytes_to_tensor(std::to_string(iterations_))});
  out.push_back({"meta.rng.target_noise", nn::bytes_to_tensor(noise_rng_.save_state())});
  return out;
}

void Agent::load_state_tensors(const std::vector<nn::NamedTensor>& tensors) {
  TensorLookup map;
  for (const auto& t : tensors) map[t.name] = &t.tensor;
  Agent next = *this;
  if (next.ae_) {
    load_net(map, "enc", next.ae_->encoder(), &next.ae_->encoder_optimizer());
    load_net(map, "dec", next.ae_->decoder(), &next.ae_->decoder_optimizer());
  }
  load_net(map, "actor", next.actor_, &next.actor_opt_);
  load_net(map, "critic1", next.critic1_, &next.critic1_opt_);
  load_net(map, "critic2", next.critic2_, &next.critic2_opt_);
  load_net(map, "target.actor", next.target_actor_, nullptr);
  load_net(map, "target.critic1", next.target_critic1_, nullptr);
  load_net(map, "target.critic2", next.target_critic2_, nullptr);
  if (next.predictor_) {
    for (std::size_t m = 0; m < next.predictor_->size(); ++m) {
      load_net(map, "pred." + std::to_string(m), next.predictor_->member(m), &next.predictor_->optimizer(m));
    }
  }
  next.iterations_ = lookup_int(map, "meta.iterations");
  next.noise_rng_.load_state(nn::tensor_to_bytes(lookup(map, "meta.rng.target_noise", nullptr)));
  *this = std::move(next);
}

std::uint64_t Agent::state_hash() const {
  std::uint64_t h = 0;
  auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
  if (ae_) {
    mix(ae_->encoder().param_hash());
    mix(ae_->decoder().param_hash());
  }
  for (const auto* net : {&actor_, &critic1_, &critic2_, &target_actor_, &target_critic1_, &target_critic2_}) {
    mix(net->param_hash());
  }
  if (predictor_) {
    for (std::size_t m = 0; m < predictor_->size(); ++m) mix(predictor_->member(m).param_hash());
  }
  return h;
}

}  // namespace nasa
