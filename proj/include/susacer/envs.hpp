#pragma once

#include <memory>
#include <string>
#include <vector>

#include "susacer/common.hpp"
#include "susacer/rng.hpp"

namespace susacer {

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int action_dim = 0;
  dvec action_low, action_high;
  double h = 0.01;     // base physics step, seconds
  int sub_steps = 1;   // physics steps per environment step
  int time_limit = 0;  // environment steps per episode
};

struct StepResult {
  dvec next;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

// Task dynamics, decoupled from episode bookkeeping. Rewards are rates per
// second so episode totals are consistent under sub-step refinement.
class Task {
 public:
  virtual ~Task() = default;
  virtual const char* name() const = 0;
  virtual int phys_dim() const = 0;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual dvec action_low() const = 0;
  virtual dvec action_high() const = 0;
  virtual int default_time_limit() const = 0;
  virtual dvec initial_state(Rng& rng) const = 0;
  virtual void substep(dvec& state, const dvec& a, double h) const = 0;  // semi-implicit Euler
  virtual double reward_rate(const dvec& state, const dvec& a) const = 0;
  virtual bool is_terminal(const dvec& state) const = 0;
  virtual void observe(const dvec& state, dvec& obs) const = 0;
};

// 2-D double integrator steered to the origin. Action is acceleration in
// [-1,1]^2, reward rate -(distance) - 0.01|a|^2, episode ends inside the
// goal radius.
class PointMassTask final : public Task {
 public:
  static constexpr double kGoalRadius = 0.1;
  const char* name() const override { return "point_mass"; }
  int phys_dim() const override { return 4; }  // px py vx vy
  int obs_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  dvec action_low() const override { return {-1.0, -1.0}; }
  dvec action_high() const override { return {1.0, 1.0}; }
  int default_time_limit() const override { return 300; }
  dvec initial_state(Rng& rng) const override;
  void substep(dvec& state, const dvec& a, double h) const override;
  double reward_rate(const dvec& state, const dvec& a) const override;
  bool is_terminal(const dvec& state) const override;
  void observe(const dvec& state, dvec& obs) const override { obs = state; }
};

// Torque-limited pendulum swing-up; angle 0 is upright. The torque bound is
// well below the gravity torque so the pole must be swung. No terminal
// state, reward rate -(angle^2 + 0.1 w^2 + 0.001 u^2).
class PendulumTask final : public Task {
 public:
  static constexpr double kGravity = 9.81;
  static constexpr double kMaxTorque = 2.0;
  const char* name() const override { return "pendulum"; }
  int phys_dim() const override { return 2; }  // theta omega
  int obs_dim() const override { return 3; }   // cos sin omega
  int action_dim() const override { return 1; }
  dvec action_low() const override { return {-kMaxTorque}; }
  dvec action_high() const override { return {kMaxTorque}; }
  int default_time_limit() const override { return 200; }
  dvec initial_state(Rng& rng) const override;
  void substep(dvec& state, const dvec& a, double h) const override;
  double reward_rate(const dvec& state, const dvec& a) const override;
  bool is_terminal(const dvec&) const override { return false; }
  void observe(const dvec& state, dvec& obs) const override;

  // Free-dynamics energy, used by integration tests.
  static double energy(const dvec& state);
};

std::unique_ptr<Task> make_task(const std::string& name);

// Pure physics: integrate one environment step (sub_steps semi-implicit
// Euler substeps of length h) from a given physical state under a held,
// already clipped action. Reward is the time integral of the rate.
struct PhysStep {
  dvec state;
  double reward = 0.0;
  bool terminal = false;
};
PhysStep step_physics(const Task& task, const dvec& state, const dvec& action, double h,
                      int sub_steps);

// Episode-level wrapper: clips actions to the box, applies the time limit,
// maps physical states to observations.
class Environment {
 public:
  Environment(std::unique_ptr<Task> task, double h, int sub_steps, int time_limit);
  static Environment make(const std::string& name, double h = 0.01, int sub_steps = 1,
                          int time_limit = 0);

  const EnvSpec& spec() const { return spec_; }
  const Task& task() const { return *task_; }

  dvec reset(Rng& rng);
  StepResult step(const dvec& action);

  const dvec& phys_state() const { return state_; }
  int steps_done() const { return steps_done_; }

 private:
  std::unique_ptr<Task> task_;
  EnvSpec spec_;
  dvec state_;
  int steps_done_ = 0;
};

// Small enumerable MDP used by the exact importance-sampling and value
// oracles. Tables are fixed; see the README for the published values.
struct OracleMdp {
  int n_states = 0;
  int n_actions = 0;
  int start_state = 0;
  std::vector<double> trans;   // [s][a][s'] row-major
  std::vector<double> reward;  // [s][a]

  double p(int s, int a, int s2) const { return trans[(s * n_actions + a) * n_states + s2]; }
  double r(int s, int a) const { return reward[s * n_actions + a]; }
};

OracleMdp oracle_mdp();

}  // namespace susacer
