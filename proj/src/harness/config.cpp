#include "nasa/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace nasa {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("bad value '" + value + "' for key '" + key + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value '" + value + "' for key '" + key + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw std::invalid_argument("bad value '" + value + "' for key '" + key + "'");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define NASA_INT_FIELD(name, member, type)                                                                       \
  {                                                                                                              \
    name, Field {                                                                                                \
      [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_number<type>(k, v); },    \
          [](const RunConfig& c) { return std::to_string(c.member); }                                           \
    }                                                                                                            \
  }
#define NASA_DOUBLE_FIELD(name, member)                                                                          \
  {                                                                                                              \
    name, Field {                                                                                                \
      [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); },          \
          [](const RunConfig& c) { return fmt_double(c.member); }                                               \
    }                                                                                                            \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"env", Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                      if (v != "valve" && v != "reacher") {
                        throw std::invalid_argument("bad value '" + v + "' for key '" + k + "' (valve|reacher)");
                      }
                      c.env = v;
                    },
                    [](const RunConfig& c) { return c.env; }}},
      {"valve_reset", Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                              if (v == "hold") c.valve_reset = ValveReset::kHold;
                              else if (v == "random") c.valve_reset = ValveReset::kRandom;
                              else throw std::invalid_argument("bad value '" + v + "' for key '" + k + "' (hold|random)");
                            },
                            [](const RunConfig& c) {
                              return std::string(c.valve_reset == ValveReset::kHold ? "hold" : "random");
                            }}},
      {"variant", Field{[](RunConfig& c, const std::string&, const std::string& v) { c.agent.variant = parse_variant(v); },
                        [](const RunConfig& c) { return to_string(c.agent.variant); }}},
      {"ssim_clamp", Field{[](RunConfig& c, const std::string& k, const std::string& v) { c.agent.clamp_ssim = parse_bool(k, v); },
                           [](const RunConfig& c) { return std::string(c.agent.clamp_ssim ? "true" : "false"); }}},
      {"out_dir", Field{[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                        [](const RunConfig& c) { return c.out_dir.string(); }}},
      NASA_DOUBLE_FIELD("valve_max_step", valve_max_step),
      NASA_INT_FIELD("episode_steps", episode_steps, int),
      NASA_INT_FIELD("image_height", agent.obs.height, int),
      NASA_INT_FIELD("image_width", agent.obs.width, int),
      NASA_INT_FIELD("frame_stack", agent.obs.stack, int),
      NASA_INT_FIELD("z_dim", agent.z_dim, int),
      NASA_INT_FIELD("ae_filters", agent.ae_filters, int),
      NASA_INT_FIELD("actor_hidden", agent.actor_hidden, int),
      NASA_INT_FIELD("critic_hidden", agent.critic_hidden, int),
      NASA_INT_FIELD("predictor_hidden", agent.predictor_hidden, int),
      NASA_INT_FIELD("ensemble_size", agent.ensemble_size, int),
      NASA_DOUBLE_FIELD("lr_actor", agent.lr_actor),
      NASA_DOUBLE_FIELD("lr_critic", agent.lr_critic),
      NASA_DOUBLE_FIELD("lr_encoder", agent.lr_encoder),
      NASA_DOUBLE_FIELD("lr_decoder", agent.lr_decoder),
      NASA_DOUBLE_FIELD("lr_predictor", agent.lr_predictor),
      NASA_DOUBLE_FIELD("gamma", agent.hyper.gamma),
      NASA_DOUBLE_FIELD("tau", agent.hyper.tau),
      NASA_INT_FIELD("policy_delay", agent.hyper.policy_delay, int),
      NASA_DOUBLE_FIELD("target_noise_sigma", agent.hyper.target_noise_sigma),
      NASA_DOUBLE_FIELD("noise_clip", agent.hyper.noise_clip),
      NASA_DOUBLE_FIELD("explore_sigma", agent.hyper.explore_sigma),
      NASA_INT_FIELD("batch_size", agent.hyper.batch_size, int),
      NASA_INT_FIELD("updates_per_step", agent.hyper.updates_per_step, int),
      NASA_DOUBLE_FIELD("alpha", agent.weights.alpha),
      NASA_DOUBLE_FIELD("beta", agent.weights.beta),
      NASA_INT_FIELD("ssim_window", agent.ssim.window, int),
      NASA_DOUBLE_FIELD("ssim_k1", agent.ssim.k1),
      NASA_DOUBLE_FIELD("ssim_k2", agent.ssim.k2),
      NASA_INT_FIELD("buffer_capacity", buffer_capacity, std::size_t),
      NASA_INT_FIELD("total_steps", total_steps, std::int64_t),
      NASA_INT_FIELD("warmup_steps", warmup_steps, std::int64_t),
      NASA_INT_FIELD("eval_every", eval_every, std::int64_t),
      NASA_INT_FIELD("eval_episodes", eval_episodes, int),
      NASA_INT_FIELD("seed", seed, std::uint64_t),
  };
  return table;
}

#undef NASA_INT_FIELD
#undef NASA_DOUBLE_FIELD

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& kv) {
  const auto& table = fields();
  for (const auto& [key, value] : kv) {
    auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second.set(base, key, value);
  }
  return base;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  return apply_overrides(std::move(base), parse_key_values(text));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [key, field] : fields()) os << key << " = " << field.get(*this) << '\n';
  return os.str();
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid config: " + what);
  };
  const auto& a = agent;
  require(a.obs.height > 0 && a.obs.width > 0, "image dimensions must be positive");
  require(a.obs.stack >= 1, "frame_stack must be >= 1");
  require(a.z_dim >= 1, "z_dim must be >= 1");
  require(a.ae_filters >= 1 && a.actor_hidden >= 1 && a.critic_hidden >= 1 && a.predictor_hidden >= 1,
          "layer widths must be >= 1");
  require(a.ensemble_size >= 1, "ensemble_size must be >= 1");
  require(a.hyper.gamma >= 0 && a.hyper.gamma < 1, "gamma must be in [0,1)");
  require(a.hyper.tau >= 0 && a.hyper.tau <= 1, "tau must be in [0,1]");
  require(a.hyper.policy_delay >= 1, "policy_delay must be >= 1");
  require(a.hyper.policy_delay <= a.hyper.updates_per_step, "policy_delay must not exceed updates_per_step");
  require(a.hyper.updates_per_step >= 1, "updates_per_step must be >= 1");
  require(a.hyper.batch_size >= 1, "batch_size must be >= 1");
  require(a.hyper.target_noise_sigma >= 0 && a.hyper.noise_clip >= 0 && a.hyper.explore_sigma >= 0,
          "noise scales must be >= 0");
  require(a.weights.alpha >= 0 && a.weights.beta >= 0, "alpha and beta must be >= 0");
  require(a.ssim.window >= 3 && a.ssim.window % 2 == 1 && a.ssim.window <= std::min(a.obs.height, a.obs.width),
          "ssim_window must be odd, >= 3 and fit the image");
  require(a.ssim.k1 > 0 && a.ssim.k2 > 0, "ssim constants must be positive");
  require(buffer_capacity >= 1, "buffer_capacity must be >= 1");
  require(total_steps >= 0 && warmup_steps >= 0, "step counts must be >= 0");
  require(eval_every >= 1, "eval_every must be >= 1");
  require(eval_episodes >= 1, "eval_episodes must be >= 1");
  require(episode_steps >= 1, "episode_steps must be >= 1");
  require(valve_max_step > 0, "valve_max_step must be positive");
}

std::unique_ptr<Environment> make_env(const RunConfig& cfg) {
  const RenderSize size{cfg.agent.obs.height, cfg.agent.obs.width};
  if (cfg.env == "valve") {
    ValveOptions o;
    o.size = size;
    o.reset = cfg.valve_reset;
    o.max_step = cfg.valve_max_step;
    o.step_limit = cfg.episode_steps;
    return std::make_unique<ValveTurnEnv>(o);
  }
  if (cfg.env == "reacher") {
    ReacherOptions o;
    o.size = size;
    o.step_limit = cfg.episode_steps;
    return std::make_unique<ReacherSparseEnv>(o);
  }
  throw std::invalid_argument("unknown env '" + cfg.env + "'");
}

AgentConfig resolved_agent_config(const RunConfig& cfg) {
  AgentConfig a = cfg.agent;
  a.obs.channels_per_frame = 3;
  a.action_dim = cfg.env == "reacher" ? 2 : 1;
  return a;
}

}  // namespace nasa
