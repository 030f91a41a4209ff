#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>

#include "nasa/imaging.hpp"
#include "nasa/rng.hpp"

namespace nasa {

struct EnvStep {
  Image observation;
  double r_ext = 0;
  bool done = false;
  std::map<std::string, double> info;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::string name() const = 0;
  virtual int action_dim() const = 0;
  virtual Image reset(Rng& rng) = 0;
  // Actions outside [-1,1] are clipped and counted in info["clipped_actions"].
  virtual EnvStep step(std::span<const float> action) = 0;
  virtual Image render() const = 0;
  virtual int steps_taken() const = 0;
};

struct RenderSize {
  int height = 84;
  int width = 84;
};

enum class ValveReset { kHold, kRandom };

struct ValveOptions {
  RenderSize size;
  ValveReset reset = ValveReset::kRandom;
  double max_step = 0.3;  // radians per unit action
  int step_limit = 50;
};

// Valve with one actuated rotational degree of freedom. Reward is the
// negative circular distance to the target angle, normalized to [-1, 0].
class ValveTurnEnv final : public Environment {
 public:
  explicit ValveTurnEnv(ValveOptions opts = {});

  std::string name() const override { return "valve"; }
  int action_dim() const override { return 1; }
  Image reset(Rng& rng) override;
  EnvStep step(std::span<const float> action) override;
  Image render() const override;
  int steps_taken() const override { return steps_; }

  double angle() const { return theta_; }
  double target() const { return target_; }
  // Test hook: places the valve and target directly (angles are wrapped).
  void set_state(double theta, double target);
  // Greedy scripted action from the true state: turns along the shorter arc.
  float oracle_action() const;
  const ValveOptions& options() const { return opts_; }

 private:
  ValveOptions opts_;
  double theta_ = 0;
  double target_ = 0;
  int steps_ = 0;
  bool initialized_ = false;
};

struct ReacherOptions {
  RenderSize size;
  double goal_radius = 0.1;
  double agent_radius = 0.05;
  double max_speed = 0.05;  // position units per unit action
  int step_limit = 50;
};

// Point agent in the unit square; reward 1 on every step spent within the
// goal radius, 0 otherwise. Episodes run to the step limit.
class ReacherSparseEnv final : public Environment {
 public:
  explicit ReacherSparseEnv(ReacherOptions opts = {});

  std::string name() const override { return "reacher"; }
  int action_dim() const override { return 2; }
  Image reset(Rng& rng) override;
  EnvStep step(std::span<const float> action) override;
  Image render() const override;
  int steps_taken() const override { return steps_; }

  double x() const { return x_; }
  double y() const { return y_; }
  double goal_x() const { return gx_; }
  double goal_y() const { return gy_; }
  void set_state(double x, double y, double goal_x, double goal_y);
  bool in_goal() const;
  const ReacherOptions& options() const { return opts_; }

 private:
  ReacherOptions opts_;
  double x_ = 0.5, y_ = 0.5, gx_ = 0.5, gy_ = 0.5;
  int steps_ = 0;
};

double wrap_angle(double a);
// min(|u - v|, 2pi - |u - v|) on wrapped angles.
double circular_distance(double u, double v);

}  // namespace nasa
