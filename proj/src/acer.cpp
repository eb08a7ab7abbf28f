#include "susacer/acer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace susacer {

void AgentConfig::validate() {
  SUSACER_CHECK(gamma > 0.0 && gamma < 1.0, "gamma outside (0,1)");
  SUSACER_CHECK(n >= 1, "trajectory window must be >= 1");
  SUSACER_CHECK(b > 0.0, "truncation level must be > 0");
  SUSACER_CHECK(sigma_base > 0.0, "sigma_base must be > 0");
  SUSACER_CHECK(batch >= 1, "batch must be >= 1");
  SUSACER_CHECK(memory >= 1, "memory must be >= 1");
  schedule.cap = n;  // the sustain cap always equals the trajectory window
  schedule.validate();
}

ActResult act(const GaussianPolicy& pi, const SustainSchedule& sched, std::uint64_t t,
              const double* prev, const dvec& state, std::uint32_t run_len, Rng& rng,
              dvec& action, MlpWorkspace& ws) {
  ActResult res;
  if (prev == nullptr) {
    // Episode start: the agent must choose. p_eff is recorded from the same
    // rule as every other step so it stays recomputable at replay time; it
    // is never consumed, trajectory heads contribute the density ratio only.
    res.run_len = 0;
    res.p_eff = effective_p(sched, t, 0);
    res.fresh = true;
  } else {
    res.run_len = run_len;
    res.p_eff = effective_p(sched, t, run_len);
    res.fresh = should_terminate(rng, res.p_eff);
  }

  action.resize(pi.action_dim());
  if (res.fresh) {
    pi.sample(state.data(), rng, action.data(), ws);
  } else {
    std::copy(prev, prev + pi.action_dim(), action.begin());
    pi.mean(state.data(), ws);
  }
  // The mean of `state` is cached in ws by both branches.
  res.base_logd = pi.log_density_from_mean(ws.h.back().data(), action.data());
  return res;
}

double compute_update(const Trajectory& traj, const GaussianPolicy& pi, const ValueFunction& vf,
                      const SustainSchedule& sched, std::uint64_t t_now, const AgentConfig& cfg,
                      UpdateWorkspace& ws, double weight, dvec& dtheta_acc, dvec& dnu_acc,
                      double& max_abs_rho) {
  const std::size_t len = traj.length();
  const Transition& head = traj.first();
  const int sdim = int(head.s.size());

  // Critic values at the head state and each step's successor, one batch.
  ws.states.resize((len + 1) * sdim);
  std::memcpy(ws.states.data(), head.s.data(), sdim * sizeof(double));
  for (std::size_t m = 0; m < len; m++)
    std::memcpy(ws.states.data() + (m + 1) * sdim, traj[m].s_next.data(), sdim * sizeof(double));
  const double* vvals = vf.values(ws.states.data(), int(len) + 1, ws.v_batch_ws);
  const double v_head = vvals[0];

  trajectory_is(traj, pi, sched, t_now, ws.pi_ws, ws.is);

  double d_sum = 0.0;
  double ret = 0.0;
  double g = 1.0;
  for (std::size_t m = 1; m <= len; m++) {
    ret += g * traj[m - 1].reward;
    g *= cfg.gamma;
    const double bootstrap = traj[m - 1].terminal ? 0.0 : g * vvals[m];
    const double a_m = ret + bootstrap - v_head;
    const double rho = soft_truncate(ws.is[m - 1], cfg.b);
    SUSACER_CHECK(std::abs(rho) < cfg.b, "truncated weight reached the bound");
    if (std::abs(rho) > max_abs_rho) max_abs_rho = std::abs(rho);
    d_sum += a_m * rho;
  }
  const double d = d_sum / double(len);
  SUSACER_CHECK(std::isfinite(d), "non-finite temporal-difference average");

  const double s = d * weight;
  pi.grad_log_density(head.s.data(), head.a.data(), s, ws.pi_ws, dtheta_acc.data());
  // critic gradient straight off row 0 of the batched forward
  vf.net().backward(ws.states.data(), &s, 0, ws.v_batch_ws, dnu_acc.data());
  return d;
}

Agent::Agent(const AgentConfig& cfg, int obs_dim, int action_dim, std::uint64_t seed)
    : cfg_(cfg),
      pi_(obs_dim, cfg.hidden, action_dim),
      vf_(obs_dim, cfg.hidden),
      buffer_(cfg.memory, cfg.n),
      prev_action_(action_dim, 0.0),
      action_(action_dim, 0.0) {
  cfg_.validate();
  Rng init_rng(derive_seed(seed, 0x11));
  pi_.init_params(init_rng, 0.01);
  vf_.init_params(init_rng, 0.01);
  pi_.set_sigma(sigma_at(0));
  actor_adam_ = AdamState(pi_.mean_net().param_count(), cfg_.actor_lr);
  critic_adam_ = AdamState(vf_.net().param_count(), cfg_.critic_lr);
  uws_.pi_ws = pi_.make_workspace(1);
  uws_.v_batch_ws = vf_.make_workspace(int(cfg_.n) + 1);
  act_ws_ = pi_.make_workspace(1);
  dtheta_acc_.assign(pi_.mean_net().param_count(), 0.0);
  dnu_acc_.assign(vf_.net().param_count(), 0.0);
  traj_scratch_.steps.reserve(cfg_.n);
}

const dvec& Agent::act_env(const dvec& obs, Rng& rng) {
  pi_.set_sigma(sigma_at(t_global_));
  pending_ = act(pi_, cfg_.schedule, t_global_, has_prev_ ? prev_action_.data() : nullptr, obs,
                 sustain_.run_len, rng, action_, act_ws_);
  return action_;
}

void Agent::record(const dvec& obs, const dvec& next_obs, double reward, bool terminal,
                   bool truncated) {
  Transition tr;
  tr.s = obs;
  tr.a = action_;
  tr.reward = reward;
  tr.s_next = next_obs;
  tr.terminal = terminal;
  tr.truncated = truncated;
  tr.fresh = pending_.fresh;
  tr.p_eff = pending_.p_eff;
  tr.base_logd = pending_.base_logd;
  tr.run_len = pending_.run_len;
  tr.t_global = t_global_;
  buffer_.push(std::move(tr));

  if (terminal || truncated) {
    has_prev_ = false;
    sustain_ = SustainState{};
  } else {
    has_prev_ = true;
    prev_action_ = action_;
    sustain_.fresh = pending_.fresh;
    sustain_.run_len = pending_.fresh ? 0 : pending_.run_len + 1;
  }
  t_global_ += 1;
}

void Agent::train_step(Rng& rng) {
  if (buffer_.size() < cfg_.learning_start) return;
  pi_.set_sigma(sigma_at(t_global_));

  std::fill(dtheta_acc_.begin(), dtheta_acc_.end(), 0.0);
  std::fill(dnu_acc_.begin(), dnu_acc_.end(), 0.0);
  const double weight = 1.0 / double(cfg_.batch);
  for (std::size_t i = 0; i < cfg_.batch; i++) {
    if (!buffer_.sample_trajectory(rng, traj_scratch_)) return;  // nothing to learn from
    compute_update(traj_scratch_, pi_, vf_, cfg_.schedule, t_global_, cfg_, uws_, weight,
                   dtheta_acc_, dnu_acc_, max_abs_rho_);
  }
  adam_step(actor_adam_, pi_.mean_net().params(), dtheta_acc_);
  adam_step(critic_adam_, vf_.net().params(), dnu_acc_);
}

std::uint64_t Agent::train_state_hash() const {
  std::uint64_t h = buffer_.content_hash();
  h ^= t_global_ + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  const std::uint64_t r = sustain_.run_len;
  h ^= r + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace susacer
