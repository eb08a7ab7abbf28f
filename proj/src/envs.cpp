#include "susacer/envs.hpp"

#include <algorithm>
#include <cmath>

namespace susacer {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}
}  // namespace

dvec PointMassTask::initial_state(Rng& rng) const {
  return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0, 0.0};
}

void PointMassTask::substep(dvec& s, const dvec& a, double h) const {
  s[2] += h * a[0];
  s[3] += h * a[1];
  s[0] += h * s[2];
  s[1] += h * s[3];
}

double PointMassTask::reward_rate(const dvec& s, const dvec& a) const {
  const double dist = std::sqrt(s[0] * s[0] + s[1] * s[1]);
  return -dist - 0.01 * (a[0] * a[0] + a[1] * a[1]);
}

bool PointMassTask::is_terminal(const dvec& s) const {
  return s[0] * s[0] + s[1] * s[1] <= kGoalRadius * kGoalRadius;
}

dvec PendulumTask::initial_state(Rng& rng) const {
  return {rng.uniform(-kPi, kPi), rng.uniform(-1.0, 1.0)};
}

void PendulumTask::substep(dvec& s, const dvec& a, double h) const {
  s[1] += h * (kGravity * std::sin(s[0]) + a[0]);
  s[0] += h * s[1];
}

double PendulumTask::reward_rate(const dvec& s, const dvec& a) const {
  const double th = wrap_angle(s[0]);
  return -(th * th + 0.1 * s[1] * s[1] + 0.001 * a[0] * a[0]);
}

void PendulumTask::observe(const dvec& s, dvec& obs) const {
  obs.resize(3);
  obs[0] = std::cos(s[0]);
  obs[1] = std::sin(s[0]);
  obs[2] = s[1];
}

double PendulumTask::energy(const dvec& s) {
  return 0.5 * s[1] * s[1] + kGravity * std::cos(s[0]);
}

std::unique_ptr<Task> make_task(const std::string& name) {
  if (name == "point_mass") return std::make_unique<PointMassTask>();
  if (name == "pendulum") return std::make_unique<PendulumTask>();
  throw std::invalid_argument("unknown environment: " + name);
}

PhysStep step_physics(const Task& task, const dvec& state, const dvec& action, double h,
                      int sub_steps) {
  for (double v : state) SUSACER_CHECK(std::isfinite(v), "non-finite state");
  for (double v : action) SUSACER_CHECK(std::isfinite(v), "non-finite action");
  PhysStep out;
  out.state = state;
  for (int k = 0; k < sub_steps; k++) {
    task.substep(out.state, action, h);
    out.reward += h * task.reward_rate(out.state, action);
  }
  out.terminal = task.is_terminal(out.state);
  return out;
}

Environment::Environment(std::unique_ptr<Task> task, double h, int sub_steps, int time_limit)
    : task_(std::move(task)) {
  SUSACER_CHECK(h > 0.0, "physics step must be > 0");
  SUSACER_CHECK(sub_steps >= 1, "sub_steps must be >= 1");
  spec_.name = task_->name();
  spec_.obs_dim = task_->obs_dim();
  spec_.action_dim = task_->action_dim();
  spec_.action_low = task_->action_low();
  spec_.action_high = task_->action_high();
  spec_.h = h;
  spec_.sub_steps = sub_steps;
  spec_.time_limit = time_limit > 0 ? time_limit : task_->default_time_limit();
}

Environment Environment::make(const std::string& name, double h, int sub_steps, int time_limit) {
  return Environment(make_task(name), h, sub_steps, time_limit);
}

dvec Environment::reset(Rng& rng) {
  state_ = task_->initial_state(rng);
  steps_done_ = 0;
  dvec obs;
  task_->observe(state_, obs);
  return obs;
}

StepResult Environment::step(const dvec& action) {
  SUSACER_CHECK(int(action.size()) == spec_.action_dim, "action dimension mismatch");
  dvec clipped(action.size());
  for (std::size_t i = 0; i < action.size(); i++)
    clipped[i] = std::clamp(action[i], spec_.action_low[i], spec_.action_high[i]);

  PhysStep ps = step_physics(*task_, state_, clipped, spec_.h, spec_.sub_steps);
  state_ = std::move(ps.state);
  steps_done_ += 1;

  StepResult res;
  task_->observe(state_, res.next);
  res.reward = ps.reward;
  res.terminal = ps.terminal;
  res.truncated = !ps.terminal && steps_done_ >= spec_.time_limit;
  return res;
}

OracleMdp oracle_mdp() {
  OracleMdp m;
  m.n_states = 3;
  m.n_actions = 2;
  m.start_state = 0;
  m.trans = {
      // s=0
      0.60, 0.30, 0.10,  // a=0
      0.20, 0.50, 0.30,  // a=1
      // s=1
      0.10, 0.70, 0.20,  // a=0
      0.30, 0.30, 0.40,  // a=1
      // s=2
      0.50, 0.25, 0.25,  // a=0
      0.25, 0.25, 0.50,  // a=1
  };
  m.reward = {
      0.0, 1.0,   // s=0
      0.5, -0.5,  // s=1
      1.0, 0.0,   // s=2
  };
  return m;
}

}  // namespace susacer
