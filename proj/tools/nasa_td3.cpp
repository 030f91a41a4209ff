#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nasa/harness/config.hpp"
#include "nasa/harness/plot.hpp"
#include "nasa/harness/trainer.hpp"
#include "nasa/imaging.hpp"
#include "nasa/nn/checkpoint.hpp"

namespace {

std::map<std::string, std::string> overrides_from(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> kv;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    const auto parsed = nasa::parse_key_values(s);
    for (const auto& [k, v] : parsed) kv[k] = v;
  }
  return kv;
}

int cmd_train(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out, const std::vector<std::string>& sets) {
  nasa::RunConfig cfg = config_path.empty() ? nasa::RunConfig{} : nasa::load_config(config_path);
  cfg = nasa::apply_overrides(cfg, overrides_from(sets));
  if (seed) cfg.seed = *seed;
  if (out) cfg.out_dir = *out;
  cfg.validate();
  nasa::Trainer trainer(cfg);
  std::cout << "training " << nasa::to_string(cfg.agent.variant) << " on " << cfg.env << " for " << cfg.total_steps
            << " steps (seed " << cfg.seed << ") -> " << cfg.out_dir.string() << std::endl;
  trainer.run([](const nasa::EvalRow& r) {
    std::printf("step %lld  eval mean_return %.4f  stddev %.4f\n", static_cast<long long>(r.step), r.mean_return,
                r.return_stddev);
    std::fflush(stdout);
  });
  std::cout << "checkpoint written to " << trainer.checkpoint_path().string() << std::endl;
  return 0;
}

int cmd_eval(const std::string& checkpoint, int episodes, std::uint64_t seed, const std::string& frames_dir) {
  auto loaded = nasa::load_checkpoint(checkpoint);
  auto env = nasa::make_env(loaded.config);
  nasa::Rng rng = nasa::RngStreams(seed).stream("eval");
  nasa::Rng unused(0);
  int frame = 0;
  const nasa::Agent& agent = *loaded.agent;
  const auto result = nasa::evaluate_policy(*env, episodes, agent.config().obs.stack, rng, [&](const nasa::FrameStack& s) {
    if (!frames_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06d.ppm", frame++);
      nasa::write_ppm(std::filesystem::path(frames_dir) / name, s.frames().back());
    }
    return agent.select_action(s, false, unused);
  });
  for (std::size_t i = 0; i < result.returns.size(); ++i) std::printf("episode %zu return %.6f\n", i, result.returns[i]);
  std::printf("mean_return %.6f\nreturn_stddev %.6f\n", result.mean_return, result.return_stddev);
  return 0;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out) {
  std::vector<std::filesystem::path> paths(csvs.begin(), csvs.end());
  for (const auto& p : nasa::plot_metrics(paths, out)) std::cout << p.string() << "\n";
  return 0;
}

int cmd_inspect(const std::string& path) {
  const auto tensors = nasa::nn::read_tensors(path);
  std::size_t total = 0;
  for (const auto& t : tensors) {
    if (t.name.rfind("meta.", 0) == 0 || (t.name.rfind("adam.", 0) == 0 && t.name.size() > 2 &&
                                           t.name.compare(t.name.size() - 2, 2, ".t") == 0)) {
      std::string text = nasa::nn::tensor_to_bytes(t.tensor);
      if (t.name == "meta.rng.target_noise") text = "<" + std::to_string(text.size()) + " bytes>";
      std::cout << t.name << " = " << text << "\n";
      continue;
    }
    total += t.tensor.size();
    std::cout << t.name << " " << nasa::nn::shape_to_string(t.tensor.shape()) << "\n";
  }
  std::cout << tensors.size() << " tensors, " << total << " float values\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NaSA-TD3: pixel-based TD3 with novelty and surprise intrinsic rewards"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train an agent and write metrics and checkpoints");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> sets;
  train->add_option("--config", config_path, "key = value configuration file");
  train->add_option("--seed", seed, "master seed (overrides the file)");
  train->add_option("--out", out, "output directory (overrides the file)");
  train->add_option("--set", sets, "extra key=value override, repeatable");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with exploration off");
  std::string checkpoint;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  std::string frames_dir;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--episodes", episodes, "number of episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "seed for environment resets");
  eval->add_option("--frames", frames_dir, "write every observed frame as PPM into this directory");

  auto* plot = app.add_subcommand("plot", "render mean +- stddev learning curves as SVG");
  std::vector<std::string> csvs;
  std::string plot_out = "plots";
  plot->add_option("csv", csvs, "metrics CSV files")->required();
  plot->add_option("--out", plot_out, "output directory");

  auto* inspect = app.add_subcommand("inspect-checkpoint", "list the tensors stored in a checkpoint");
  std::string inspect_path;
  inspect->add_option("file", inspect_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, seed, out, sets);
    if (*eval) {
      if (!frames_dir.empty()) std::filesystem::create_directories(frames_dir);
      return cmd_eval(checkpoint, episodes, eval_seed, frames_dir);
    }
    if (*plot) return cmd_plot(csvs, plot_out);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
