#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "susacer/approximator.hpp"
#include "susacer/common.hpp"
#include "susacer/replay.hpp"
#include "susacer/rng.hpp"
#include "susacer/sustain.hpp"

namespace susacer {

struct AgentConfig {
  double gamma = 0.99;
  std::uint32_t n = 4;        // trajectory window, also the sustain cap
  double b = 3.0;             // soft-truncation level
  double sigma_base = 0.4;    // exploration std at expected duration 1
  double actor_lr = 3e-5;
  double critic_lr = 1e-4;
  std::size_t batch = 256;    // trajectories per update
  std::size_t learning_start = 10000;
  std::size_t memory = 1000000;
  std::vector<int> hidden = {64, 64};
  SustainSchedule schedule{1.0, 1.0, 1};

  // Normalizes the cap to the trajectory window and checks ranges.
  void validate();
};

// Outcome of one environment-level action choice.
struct ActResult {
  bool fresh = false;
  double p_eff = 1.0;
  double base_logd = 0.0;
  std::uint32_t run_len = 0;  // incumbent run length the decision used
};

// Environment-level policy: sustain the previous action or draw a fresh one
// from the base policy. `prev` is null at episode starts, which forces a
// fresh draw. The chosen action is written to `action`; base_logd is the
// base-policy log density of that action at `state` in either branch.
ActResult act(const GaussianPolicy& pi, const SustainSchedule& sched, std::uint64_t t,
              const double* prev, const dvec& state, std::uint32_t run_len, Rng& rng,
              dvec& action, MlpWorkspace& ws);

// Soft truncation b * tanh(x / b); strictly inside (-b, b) for finite x,
// also where tanh rounds to exactly 1.
inline double soft_truncate(double x, double b) {
  SUSACER_CHECK(b > 0.0, "truncation level must be > 0");
  const double r = b * std::tanh(x / b);
  if (r >= b) return std::nextafter(b, 0.0);
  if (r <= -b) return std::nextafter(-b, 0.0);
  return r;
}

// Density ratio of one non-head trajectory step between the current policy
// (termination probability p_now) and the recorded behavior. Sustained
// steps compare sustain probabilities; fresh steps compare termination
// probabilities times base-policy densities.
template <class Policy>
double step_ratio(const Transition& tr, const Policy& pi, double p_now,
                  typename Policy::Workspace& ws) {
  if (!tr.fresh) {
    SUSACER_CHECK(tr.p_eff < 1.0, "sustained step recorded with p_eff = 1");
    if (p_now >= 1.0) return 0.0;
    return (1.0 - p_now) / (1.0 - tr.p_eff);
  }
  const double logd = pi.log_density(tr.s.data(), tr.a.data(), ws);
  return (p_now / tr.p_eff) * std::exp(logd - tr.base_logd);
}

// Importance weights IS^m for m = 1..len(traj): the head contributes the
// base-policy density ratio alone, later steps multiply in step_ratio with
// the current termination probability recomputed at each step's recorded
// run length.
template <class Policy>
void trajectory_is(const Trajectory& traj, const Policy& pi, const SustainSchedule& sched,
                   std::uint64_t t_now, typename Policy::Workspace& ws, dvec& out) {
  out.clear();
  const Transition& head = traj.first();
  SUSACER_CHECK(head.fresh, "trajectory must start at a fresh step");
  double is = std::exp(pi.log_density(head.s.data(), head.a.data(), ws) - head.base_logd);
  SUSACER_CHECK(std::isfinite(is) && is >= 0.0, "importance weight not finite");
  out.push_back(is);
  for (std::size_t m = 1; m < traj.length(); m++) {
    const Transition& tr = traj[m];
    const double p_now = effective_p(sched, t_now, tr.run_len);
    is *= step_ratio(tr, pi, p_now, ws);
    SUSACER_CHECK(std::isfinite(is) && is >= 0.0, "importance weight not finite");
    out.push_back(is);
  }
}

// m-step temporal-difference estimate: discounted rewards over the first m
// steps plus a bootstrap, minus the head value. The bootstrap vanishes when
// step m ends the episode at a true terminal; time-limit cutoffs bootstrap
// normally.
template <class Value>
double td_m(const Trajectory& traj, const Value& v, typename Value::Workspace& ws, double gamma,
            std::size_t m) {
  SUSACER_CHECK(m >= 1 && m <= traj.length(), "m outside trajectory");
  double ret = 0.0;
  double g = 1.0;
  for (std::size_t i = 0; i < m; i++) {
    ret += g * traj[i].reward;
    g *= gamma;
  }
  const Transition& last = traj[m - 1];
  if (!last.terminal) ret += g * v.value(last.s_next.data(), ws);
  return ret - v.value(traj.first().s.data(), ws);
}

// Scratch for compute_update; one per agent (or per worker thread).
struct UpdateWorkspace {
  MlpWorkspace pi_ws;
  MlpWorkspace v_batch_ws; // batched critic values along the trajectory
  dvec states;             // (n + 1) x obs_dim staging for batched values
  dvec is;                 // importance weights
};

// One trajectory's contribution to the parameter updates. Ascent directions
// scaled by `weight` are accumulated into dtheta_acc / dnu_acc. Returns the
// weighted temporal-difference average d; `max_abs_rho` is raised to the
// largest truncated weight magnitude seen.
double compute_update(const Trajectory& traj, const GaussianPolicy& pi, const ValueFunction& vf,
                      const SustainSchedule& sched, std::uint64_t t_now, const AgentConfig& cfg,
                      UpdateWorkspace& ws, double weight, dvec& dtheta_acc, dvec& dnu_acc,
                      double& max_abs_rho);

// Single-threaded training agent: owns the approximators, optimizer state,
// replay memory and the sustain bookkeeping of the running episode.
class Agent {
 public:
  Agent(const AgentConfig& cfg, int obs_dim, int action_dim, std::uint64_t seed);

  const AgentConfig& config() const { return cfg_; }
  GaussianPolicy& policy() { return pi_; }
  const GaussianPolicy& policy() const { return pi_; }
  ValueFunction& value_fn() { return vf_; }
  const ValueFunction& value_fn() const { return vf_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::uint64_t t_global() const { return t_global_; }
  double max_abs_rho() const { return max_abs_rho_; }
  const AdamState& actor_adam() const { return actor_adam_; }
  const AdamState& critic_adam() const { return critic_adam_; }

  // Current exploration std for the given step (annealed).
  double sigma_at(std::uint64_t t) const {
    return sigma_scale(expected_duration(cfg_.schedule, t), cfg_.sigma_base);
  }

  // Chooses the action for the current observation; pairs with record().
  const dvec& act_env(const dvec& obs, Rng& rng);

  // Stores the executed step and advances the sustain state and clock.
  void record(const dvec& obs, const dvec& next_obs, double reward, bool terminal,
              bool truncated);

  // One learning update: `batch` sampled trajectories, averaged, one ADAM
  // step per parameter set. No-op until learning_start transitions exist.
  void train_step(Rng& rng);

  // Hash of everything evaluation must not touch: replay memory plus clock.
  std::uint64_t train_state_hash() const;

 private:
  AgentConfig cfg_;
  GaussianPolicy pi_;
  ValueFunction vf_;
  AdamState actor_adam_;
  AdamState critic_adam_;
  ReplayBuffer buffer_;
  UpdateWorkspace uws_;
  MlpWorkspace act_ws_;
  dvec dtheta_acc_, dnu_acc_;
  Trajectory traj_scratch_;

  std::uint64_t t_global_ = 0;
  bool has_prev_ = false;
  dvec prev_action_;
  SustainState sustain_;
  dvec action_;
  ActResult pending_;
  double max_abs_rho_ = 0.0;
};

}  // namespace susacer
