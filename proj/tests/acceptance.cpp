// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                      criteria 1-4, 8, 9; learning runs print NOT RUN
//   acceptance --learning           everything, including the multi-seed training runs
//   acceptance --learning --only-learning
//
// Exit status is nonzero only when a criterion that ran failed.

#include <CLI11.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "agent_fixtures.hpp"
#include "harness_fixtures.hpp"
#include "nasa/harness/metrics.hpp"
#include "nasa/harness/plot.hpp"
#include "nasa/harness/trainer.hpp"
#include "nasa/intrinsic.hpp"

using namespace nasa;
using namespace nasa::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome ssim_oracle() {
  Rng rng(2024);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const int h = 8 + int(rng.below(77)), w = 8 + int(rng.below(77));
    const Image x = random_image(h, w, 3, rng);
    // Half the pairs are correlated so SSIM values cover more than the ~0 of noise.
    Image y = random_image(h, w, 3, rng);
    if (i % 2 == 0) {
      std::vector<float> d(x.data().begin(), x.data().end());
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::clamp(d[k] + float(rng.normal(0, 0.05)), 0.f, 1.f);
      y = Image(h, w, 3, std::move(d));
    }
    worst = std::max(worst, std::abs(ssim(x, y) - reference_ssim(x, y)));
  }
  return {worst < 1e-9, "max |windowed - brute force| = " + fmt("%.3g", worst) + " over 200 pairs (tol 1e-9)"};
}

// ---------------------------------------------------------------- 2

nn::Tensor<double> away_from_kinks(nn::Tensor<double> x) {
  for (auto& v : x.values()) v = v >= 0 ? v + 0.1 : v - 0.1;
  return x;
}

Outcome gradient_check() {
  using nn::LayerSpec;
  struct Case {
    std::string name;
    std::vector<LayerSpec> specs;
    nn::Shape sample;
    double lo = -1, hi = 1;
  };
  AutoencoderConfig ae;
  ae.obs.height = ae.obs.width = 16;
  ae.z_dim = 8;
  ae.filters = 4;
  PredictorConfig pc;
  pc.z_dim = 8;
  pc.action_dim = 2;
  pc.hidden = 16;
  const std::vector<Case> cases = {
      {"dense", {LayerSpec::dense(6, 5)}, {6}},
      {"conv2d/s2", {LayerSpec::conv2d(2, 3, 3, 2, 1)}, {2, 7, 7}},
      {"conv2d/s1", {LayerSpec::conv2d(3, 2, 3, 1, 0)}, {3, 6, 5}},
      {"deconv2d/s2", {LayerSpec::deconv2d(2, 3, 3, 2, 1, 1)}, {2, 4, 4}},
      {"deconv2d/s1", {LayerSpec::deconv2d(3, 2, 3, 1, 0, 0)}, {3, 4, 5}},
      {"flatten", {LayerSpec::flatten()}, {2, 3, 3}},
      {"unflatten", {LayerSpec::unflatten({2, 3, 2})}, {12}},
      {"relu", {LayerSpec::relu()}, {9}},
      {"tanh", {LayerSpec::tanh()}, {9}},
      {"sigmoid", {LayerSpec::sigmoid()}, {9}},
      {"layernorm", {LayerSpec::layernorm(8)}, {8}},
      {"encoder", encoder_specs(ae), ae.obs.sample_shape(), 0, 1},
      {"decoder", decoder_specs(ae), {ae.z_dim}},
      {"actor", actor_specs(8, 32, 2), {8}},
      {"critic", critic_specs(8, 32, 2), {10}},
      {"predictor", predictor_specs(pc), {10}},
  };
  double worst = 0;
  std::string where;
  int checked = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const auto& c : cases) {
      Rng rng(seed * 7919 + 11);
      nn::Network<double> net(c.specs, c.sample, rng);
      // Zero-initialised biases put dead units exactly on a relu kink.
      const auto names = net.param_names();
      for (std::size_t p = 0; p < names.size(); ++p) {
        if (names[p].ends_with("bias")) {
          for (auto& v : net.params()[p]->value.values()) v = rng.uniform(-0.1, 0.1);
        }
      }
      nn::Shape full = c.sample;
      full.insert(full.begin(), 3);
      auto x = random_tensor<double>(full, rng, c.lo, c.hi);
      if (c.name == "relu") x = away_from_kinks(x);
      const auto rep = finite_difference_check(net, x, rng, 40);
      checked += rep.checked;
      if (rep.max_rel > worst) {
        worst = rep.max_rel;
        where = c.name + " seed " + std::to_string(seed) + ": " + rep.worst;
      }
    }
  }
  return {worst < 1e-4, std::to_string(checked) + " coordinates, 11 layer kinds + 5 networks x 3 seeds, max rel err " +
                            fmt("%.3g", worst) + " (tol 1e-4) worst at " + where};
}

// ---------------------------------------------------------------- 3

Batch make_batch(const AgentConfig& c, int n, std::uint64_t seed) {
  Rng rng(seed);
  ReplayBuffer buf(std::size_t(n) + 1);
  fill_buffer(buf, c, n, rng);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[std::size_t(i)] = std::size_t(i);
  return buf.gather(idx);
}

Outcome routing() {
  using Set = std::set<std::string>;
  const Set preds{"predictor0", "predictor1", "predictor2"};
  const Set targets{"target_actor", "target_critic1", "target_critic2"};
  std::vector<std::string> failures;
  auto expect = [&](const std::string& what, const Set& got, const Set& want) {
    if (got != want) failures.push_back(what);
  };
  auto throws = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception&) {
      return true;
    }
    return false;
  };
  int checks = 0;
  for (Variant v : {Variant::kNasaTd3, Variant::kAeTd3, Variant::kPixelTd3}) {
    const std::string tag = to_string(v) + " ";
    Rng rng(31);
    const auto c = small_agent_config(v);
    Agent a(c, rng, 5);
    const Batch b = make_batch(c, 8, 77);
    const bool ae = c.uses_autoencoder();
    auto h = network_hashes(a);
    auto step = [&](const std::string& what, const std::function<void()>& f, const Set& want) {
      f();
      const auto next = network_hashes(a);
      expect(tag + what, changed(h, next), want);
      h = next;
      ++checks;
    };
    if (ae) {
      step("ae_update", [&] { a.ae_update(b); }, {"encoder", "decoder"});
    } else if (!throws([&] { a.ae_update(b); })) {
      failures.push_back(tag + "ae_update accepted");
    }
    step("critic_update", [&] { a.critic_update(b); },
         ae ? Set{"encoder", "critic1", "critic2"} : Set{"critic1", "critic2"});
    step("actor_update", [&] { a.actor_update(b); }, {"actor"});
    if (a.has_predictor()) {
      step("predictor_update", [&] { a.predictor_update(b); }, preds);
    } else if (!throws([&] { a.predictor_update(b); })) {
      failures.push_back(tag + "predictor_update accepted");
    }
    step("target_sync", [&] { a.target_sync(0.005); }, targets);
    if (v != Variant::kNasaTd3 && a.has_predictor()) failures.push_back(tag + "owns a predictor");
    if (v == Variant::kPixelTd3 && a.has_autoencoder()) failures.push_back(tag + "owns an autoencoder");
  }
  std::string detail = std::to_string(checks) + " update/variant hash checks";
  for (const auto& f : failures) detail += "; wrong mutation set: " + f;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------- 4

Outcome reward_composition() {
  Rng rng(99);
  long mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const double alpha = i % 10 == 0 ? 0.0 : rng.uniform(0, 2);
    const double beta = i % 7 == 0 ? 0.0 : rng.uniform(0, 2);
    const double e = rng.uniform(-1, 1), n = rng.uniform(0, 2), s = std::exp(rng.uniform(-10, 3));
    const double weighted_n = alpha * n;
    const double partial = e + weighted_n;
    const double weighted_s = beta * s;
    const double expected = partial + weighted_s;
    const auto b = total_reward({alpha, beta}, e, n, s);
    if (std::bit_cast<std::uint64_t>(b.r_total) != std::bit_cast<std::uint64_t>(expected) || b.r_ext != e ||
        b.r_novel != n || b.r_surprise != s) {
      ++mismatches;
    }
  }

  RunConfig rc = tiny_run(scratch_dir("acc_zero_weights"));
  rc.agent.weights = {0.0, 0.0};
  Trainer t(rc);
  for (int i = 0; i < 40; ++i) t.step();
  long stored_mismatch = 0, nonzero_bonus = 0;
  for (std::size_t i = 0; i < t.buffer().size(); ++i) {
    const auto tr = t.buffer().at(i);
    if (std::bit_cast<std::uint64_t>(tr.r_total) != std::bit_cast<std::uint64_t>(tr.breakdown.r_ext)) ++stored_mismatch;
    if (tr.breakdown.r_novel != 0 || tr.breakdown.r_surprise != 0) ++nonzero_bonus;
  }
  return {mismatches == 0 && stored_mismatch == 0 && t.buffer().size() == 40,
          std::to_string(mismatches) + "/100000 composition mismatches; alpha=beta=0 run: " +
              std::to_string(stored_mismatch) + "/" + std::to_string(t.buffer().size()) +
              " stored rewards differ from r_ext (" + std::to_string(nonzero_bonus) +
              " transitions carry nonzero bonuses that were weighted away)"};
}

// ---------------------------------------------------------------- 8

Outcome determinism_and_resume() {
  RunConfig rc = tiny_run(scratch_dir("acc_det_a"));
  rc.total_steps = 150;
  rc.eval_every = 50;
  Trainer(rc).run();
  RunConfig rc2 = rc;
  rc2.out_dir = scratch_dir("acc_det_b");
  Trainer(rc2).run();
  const bool same_steps = slurp(rc.out_dir / kStepCsvName) == slurp(rc2.out_dir / kStepCsvName);
  const bool same_evals = slurp(rc.out_dir / kEvalCsvName) == slurp(rc2.out_dir / kEvalCsvName);

  // Resume: save mid-run, reload, and compare 100 ticks of losses with the
  // uninterrupted agent on the same buffer and sampling stream.
  RunConfig rr = tiny_run(scratch_dir("acc_resume"));
  Trainer t(rr);
  for (int i = 0; i < 60; ++i) t.step();
  const fs::path ck = rr.out_dir / "mid.bin";
  save_checkpoint(ck, t.config(), t.agent());
  auto resumed = load_checkpoint(ck);
  Agent unbroken = t.agent();
  Rng s1(123), s2(123);
  int equal = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    const auto a = unbroken.train_tick(t.buffer(), s1);
    const auto b = resumed.agent->train_tick(t.buffer(), s2);
    for (auto [x, y] : {std::pair{a.ae_loss, b.ae_loss}, {a.critic_loss, b.critic_loss},
                        {a.actor_loss, b.actor_loss}, {a.predictor_loss, b.predictor_loss}}) {
      ++total;
      equal += std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
    }
  }
  const bool same_state = unbroken.state_hash() == resumed.agent->state_hash();
  return {same_steps && same_evals && equal == total && same_state,
          std::string("repeat run metrics ") + (same_steps && same_evals ? "byte-identical" : "DIFFER") +
              "; resume: " + std::to_string(equal) + "/" + std::to_string(total) +
              " loss values bit-equal over 100 ticks, final state hashes " + (same_state ? "equal" : "differ")};
}

// ---------------------------------------------------------------- 9

Outcome replay_chi_square() {
  ReplayBuffer buf(10);
  Rng fill(1);
  const auto c = small_agent_config(Variant::kNasaTd3, 8);
  fill_buffer(buf, c, 10, fill);
  Rng rng(4242);
  std::vector<long> counts(10, 0);
  const long n = 1000000;
  for (std::size_t idx : buf.sample_indices(std::size_t(n), rng)) ++counts.at(idx);
  double chi2 = 0;
  const double expected = double(n) / 10;
  for (long k : counts) chi2 += (double(k) - expected) * (double(k) - expected) / expected;
  // Upper 1% point of chi-square with 9 degrees of freedom.
  return {chi2 < 21.666, "chi2 = " + fmt("%.3f", chi2) + " over 1e6 draws, 10 items (critical 21.666 at 1%)"};
}

// ---------------------------------------------------------------- 5-7

struct LearningSetup {
  fs::path root;
  int seeds = 5;
};

RunConfig learning_config(const std::string& env, Variant v, std::int64_t steps, std::uint64_t seed,
                          const fs::path& out) {
  RunConfig rc;
  rc.env = env;
  rc.agent.variant = v;
  rc.agent.z_dim = 50;
  rc.agent.hyper.updates_per_step = 5;
  rc.total_steps = steps;
  rc.seed = seed;
  rc.out_dir = out;
  return rc;
}

// Runs (or reuses a finished) training run and returns its directory.
fs::path train_once(const RunConfig& rc) {
  if (fs::exists(rc.out_dir / "done")) return rc.out_dir;
  fs::create_directories(rc.out_dir);
  std::printf("  training %s\n", rc.out_dir.string().c_str());
  std::fflush(stdout);
  Trainer(rc).run();
  std::ofstream(rc.out_dir / "done") << "ok\n";
  return rc.out_dir;
}

double final_eval(const fs::path& dir) {
  const auto t = read_csv(dir / kEvalCsvName);
  if (t.rows.empty()) throw std::runtime_error("no evaluation rows in " + dir.string());
  return t.rows.back()[1];
}

double mean_column(const fs::path& csv, const std::string& column, double from, double to) {
  const auto t = read_csv(csv);
  const auto it = std::find(t.columns.begin(), t.columns.end(), column);
  const std::size_t col = std::size_t(it - t.columns.begin());
  double s = 0;
  long n = 0;
  for (const auto& row : t.rows) {
    if (row[0] >= from && row[0] < to) {
      s += row[col];
      ++n;
    }
  }
  return n ? s / double(n) : std::nan("");
}

Outcome novelty_trend(const LearningSetup& ls) {
  int ok = 0;
  std::string detail;
  for (int seed = 1; seed <= ls.seeds; ++seed) {
    RunConfig rc = learning_config("valve", Variant::kNasaTd3, 20000, std::uint64_t(seed),
                                   ls.root / ("novelty_valve_hold_seed" + std::to_string(seed)));
    rc.valve_reset = ValveReset::kHold;
    const fs::path dir = train_once(rc);
    const double early = mean_column(dir / kStepCsvName, "r_novel", 0, 1000);
    const double late = mean_column(dir / kStepCsvName, "r_novel", 19000, 20000);
    ok += late < early;
    detail += " seed" + std::to_string(seed) + " " + fmt("%.4f", early) + "->" + fmt("%.4f", late);
  }
  return {ok >= 4, std::to_string(ok) + "/" + std::to_string(ls.seeds) + " seeds with falling novelty:" + detail};
}

Outcome sparse_learning(const LearningSetup& ls) {
  std::map<Variant, double> mean;
  int solved = 0;
  std::string detail;
  for (Variant v : {Variant::kNasaTd3, Variant::kAeTd3, Variant::kPixelTd3}) {
    double sum = 0;
    for (int seed = 1; seed <= ls.seeds; ++seed) {
      const auto rc = learning_config("reacher", v, 30000, std::uint64_t(seed),
                                      ls.root / ("reacher_" + to_string(v) + "_seed" + std::to_string(seed)));
      const double r = final_eval(train_once(rc));
      sum += r;
      if (v == Variant::kNasaTd3) solved += r >= 5.0;
    }
    mean[v] = sum / ls.seeds;
    detail += " " + to_string(v) + " mean " + fmt("%.2f", mean[v]);
  }
  const bool ordered =
      mean[Variant::kNasaTd3] >= mean[Variant::kAeTd3] && mean[Variant::kAeTd3] >= mean[Variant::kPixelTd3];
  return {solved >= 4 && ordered, "nasa-td3 final return >= 5 in " + std::to_string(solved) + "/" +
                                      std::to_string(ls.seeds) + " seeds; ordering " +
                                      (ordered ? "holds" : "violated") + ":" + detail};
}

Outcome valve_learning(const LearningSetup& ls) {
  int wins = 0;
  std::string detail;
  for (int seed = 1; seed <= ls.seeds; ++seed) {
    double r[2];
    int k = 0;
    for (Variant v : {Variant::kNasaTd3, Variant::kPixelTd3}) {
      const auto rc = learning_config("valve", v, 30000, std::uint64_t(seed),
                                      ls.root / ("valve_" + to_string(v) + "_seed" + std::to_string(seed)));
      r[k++] = final_eval(train_once(rc));
    }
    wins += r[0] > r[1];
    detail += " seed" + std::to_string(seed) + " " + fmt("%.2f", r[0]) + " vs " + fmt("%.2f", r[1]);
  }
  return {wins >= 4, "nasa-td3 beats pixel-td3 in " + std::to_string(wins) + "/" + std::to_string(ls.seeds) +
                         " seeds:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NaSA-TD3 acceptance suite"};
  bool learning = false, only_learning = false;
  LearningSetup ls{"acceptance_runs"};
  app.add_flag("--learning", learning, "also run the multi-seed training criteria (days on one core)");
  app.add_flag("--only-learning", only_learning, "skip the property criteria");
  app.add_option("--runs", ls.root, "directory for training runs; finished runs are reused");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::string name;
    bool is_learning;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "SSIM oracle equivalence", false, ssim_oracle},
      {2, "gradient correctness", false, gradient_check},
      {3, "gradient routing", false, routing},
      {4, "reward composition", false, reward_composition},
      {5, "novelty trend (valve, hold reset)", true, [&] { return novelty_trend(ls); }},
      {6, "desk-scale sparse learning (reacher)", true, [&] { return sparse_learning(ls); }},
      {7, "desk-scale valve learning (random reset)", true, [&] { return valve_learning(ls); }},
      {8, "determinism and resume", false, determinism_and_resume},
      {9, "replay sampling uniformity", false, replay_chi_square},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (c.is_learning ? !learning : only_learning) {
      if (c.is_learning) std::printf("NOT RUN  %d %s (pass --learning)\n", c.id, c.name.c_str());
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
