#include "susacer/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "susacer/acer.hpp"
#include "susacer/approximator.hpp"
#include "susacer/replay.hpp"

namespace susacer {

SustainSchedule constant_p_schedule(double p, std::uint32_t cap) {
  SUSACER_CHECK(p > 0.0 && p <= 1.0, "p outside (0,1]");
  SustainSchedule s;
  s.e0 = 1.0 / p;
  s.te = std::numeric_limits<double>::infinity();
  s.cap = cap;
  return s;
}

namespace {

struct EnumState {
  std::vector<Transition> steps;
  double prob_b = 1.0;         // full probability, kernel included
  double prob_t = 1.0;
  std::vector<double> ratio;   // exact policy-ratio prefix per step
  int state = 0;
  std::uint32_t run_len = 0;   // incumbent run length before the next decision
  int action = -1;
};

struct EnumContext {
  const OracleMdp* mdp;
  const TabularPolicy* pi_b;
  const SustainSchedule* sched_b;
  const TabularPolicy* pi_t;
  const SustainSchedule* sched_t;
  int horizon;
  EnumerationReport* report;
};

Transition make_transition(int s, int a, int s_next, bool fresh, double p_eff,
                           std::uint32_t run_len, double base_logd, std::uint64_t t,
                           double reward) {
  Transition tr;
  tr.s = {double(s)};
  tr.a = {double(a)};
  tr.reward = reward;
  tr.s_next = {double(s_next)};
  tr.fresh = fresh;
  tr.p_eff = p_eff;
  tr.base_logd = base_logd;
  tr.run_len = run_len;
  tr.t_global = t;
  return tr;
}

void finish_trajectory(const EnumContext& ctx, const EnumState& st) {
  Trajectory traj;
  for (const Transition& t : st.steps) traj.steps.push_back(&t);

  TabularPolicy::Workspace ws;
  dvec is;
  trajectory_is(traj, *ctx.pi_t, *ctx.sched_t, 0, ws, is);

  EnumerationEntry e;
  e.prob_behavior = st.prob_b;
  e.prob_target = st.prob_t;
  e.exact_ratio = st.ratio.back();
  e.impl_is = is.back();
  for (std::size_t m = 0; m < is.size(); m++)
    e.abs_err = std::max(e.abs_err, std::abs(is[m] - st.ratio[m]));

  ctx.report->sum_behavior += st.prob_b;
  ctx.report->sum_target += st.prob_t;
  ctx.report->max_abs_err = std::max(ctx.report->max_abs_err, e.abs_err);
  ctx.report->entries.push_back(e);
}

// Depth-first enumeration over fresh/sustain events and kernel draws. The
// behavior process generates the data, so only events with positive
// behavior probability are expanded.
void enumerate(const EnumContext& ctx, EnumState& st, int depth) {
  if (depth == ctx.horizon) {
    finish_trajectory(ctx, st);
    return;
  }
  const std::uint64_t t = std::uint64_t(depth);
  const OracleMdp& mdp = *ctx.mdp;
  const int s = st.state;

  auto expand = [&](bool fresh, int a, double ev_b, double ev_t, double p_eff,
                    std::uint32_t rl) {
    const double base_logd = std::log(ctx.pi_b->prob(s, a));
    for (int s2 = 0; s2 < mdp.n_states; s2++) {
      const double k = mdp.p(s, a, s2);
      if (k == 0.0) continue;
      EnumState next = st;
      next.steps.push_back(
          make_transition(s, a, s2, fresh, p_eff, rl, base_logd, t, mdp.r(s, a)));
      next.prob_b *= ev_b * k;
      next.prob_t *= ev_t * k;
      const double prev_ratio = st.ratio.empty() ? 1.0 : st.ratio.back();
      next.ratio.push_back(prev_ratio * (ev_b == 0.0 ? 0.0 : ev_t / ev_b));
      next.state = s2;
      next.run_len = fresh ? 0 : rl + 1;
      next.action = a;
      enumerate(ctx, next, depth + 1);
    }
  };

  if (depth == 0) {
    // Head step: the agent must choose; head ratio is the base-policy ratio.
    for (int a = 0; a < mdp.n_actions; a++) {
      const double pb = ctx.pi_b->prob(s, a);
      if (pb == 0.0) continue;
      const double pt = ctx.pi_t->prob(s, a);
      expand(true, a, pb, pt, effective_p(*ctx.sched_b, t, 0), 0);
    }
    return;
  }

  const std::uint32_t rl = st.run_len;
  const double qb = effective_p(*ctx.sched_b, t, rl);
  const double qt = effective_p(*ctx.sched_t, t, rl);

  if (qb < 1.0) {
    // Sustain event with the incumbent action.
    const int a = st.action;
    const double base_logd = std::log(ctx.pi_b->prob(s, a));
    for (int s2 = 0; s2 < mdp.n_states; s2++) {
      const double k = mdp.p(s, a, s2);
      if (k == 0.0) continue;
      EnumState sus = st;
      sus.steps.push_back(make_transition(s, a, s2, false, qb, rl, base_logd, t, mdp.r(s, a)));
      sus.prob_b *= (1.0 - qb) * k;
      sus.prob_t *= (1.0 - qt) * k;
      sus.ratio.push_back(st.ratio.back() * ((1.0 - qt) / (1.0 - qb)));
      sus.state = s2;
      sus.run_len = rl + 1;
      sus.action = a;
      enumerate(ctx, sus, depth + 1);
    }
  }
  // Termination followed by a fresh draw (possibly of the same action).
  for (int a = 0; a < mdp.n_actions; a++) {
    const double pb = ctx.pi_b->prob(s, a);
    if (pb == 0.0) continue;
    const double pt = ctx.pi_t->prob(s, a);
    expand(true, a, qb * pb, qt * pt, qb, rl);
  }
}

}  // namespace

EnumerationReport brute_force_is_check(const OracleMdp& mdp, const TabularPolicy& pi_behavior,
                                       const SustainSchedule& sched_behavior,
                                       const TabularPolicy& pi_target,
                                       const SustainSchedule& sched_target, int horizon) {
  SUSACER_CHECK(horizon >= 1, "horizon must be >= 1");
  EnumerationReport report;
  EnumContext ctx{&mdp,       &pi_behavior, &sched_behavior, &pi_target,
                  &sched_target, horizon,   &report};
  EnumState st;
  st.state = mdp.start_state;
  enumerate(ctx, st, 0);
  return report;
}

VarianceReport variance_conservation_check(const std::vector<double>& e_values,
                                           double sigma_base, int horizon, int trials,
                                           std::uint64_t seed) {
  VarianceReport report;
  report.e_values = e_values;
  const double h = 0.01;

  // Actions are held for exactly e steps: the equal-partition model behind
  // the scaling rule (n independent actions splitting a window evenly).
  auto run = [&](double e, double sigma, std::uint64_t stream) {
    Rng rng(derive_seed(seed, stream));
    const int hold = int(e + 0.5);
    double mean = 0.0, m2 = 0.0;
    for (int trial = 0; trial < trials; trial++) {
      double pos = 0.0, vel = 0.0, a = 0.0;
      for (int t = 0; t < horizon; t++) {
        if (t % hold == 0) a = rng.normal(0.0, sigma);
        vel += h * a;
        pos += h * vel;
      }
      const double delta = pos - mean;
      mean += delta / double(trial + 1);
      m2 += delta * (pos - mean);
    }
    return m2 / double(trials - 1);
  };

  for (std::size_t i = 0; i < e_values.size(); i++) {
    const double e = e_values[i];
    report.var_scaled.push_back(run(e, sigma_scale(e, sigma_base), 2 * i));
    report.var_unscaled.push_back(run(e, sigma_base, 2 * i + 1));
  }
  report.baseline = run(1.0, sigma_base, 1000);
  return report;
}

GradientReport gradient_suite(int n_configs, std::uint64_t seed, double fd_step,
                              bool corrupt_sign) {
  GradientReport report;
  Rng rng(derive_seed(seed, 0x6f));

  for (int c = 0; c < n_configs; c++) {
    const int sdim = 1 + int(rng.uniform_index(5));
    const int adim = 1 + int(rng.uniform_index(3));
    const int h1 = 3 + int(rng.uniform_index(6));
    const int h2 = 3 + int(rng.uniform_index(6));

    GaussianPolicy pi(sdim, {h1, h2}, adim);
    pi.init_params(rng, 1.0);
    dvec sigma(adim);
    for (double& s : sigma) s = rng.uniform(0.3, 1.5);
    pi.set_sigma(sigma);

    ValueFunction vf(sdim, {h1, h2});
    vf.init_params(rng, 1.0);

    dvec s(sdim), a(adim);
    for (double& v : s) v = rng.normal();
    for (double& v : a) v = rng.normal();

    auto ws_pi = pi.make_workspace(1);
    auto ws_vf = vf.make_workspace(1);

    // actor: d ln pi(a|s) / d theta
    dvec ga(pi.mean_net().param_count(), 0.0);
    pi.grad_log_density(s.data(), a.data(), 1.0, ws_pi, ga.data());
    if (corrupt_sign) {
      auto it = std::max_element(ga.begin(), ga.end(),
                                 [](double x, double y) { return std::abs(x) < std::abs(y); });
      *it = -*it;
    }
    dvec& theta = pi.mean_net().params();
    double fd_amax = 0.0, diff_amax = 0.0;
    for (std::size_t i = 0; i < theta.size(); i++) {
      const double orig = theta[i];
      theta[i] = orig + fd_step;
      const double up = pi.log_density(s.data(), a.data(), ws_pi);
      theta[i] = orig - fd_step;
      const double dn = pi.log_density(s.data(), a.data(), ws_pi);
      theta[i] = orig;
      const double fd = (up - dn) / (2.0 * fd_step);
      fd_amax = std::max(fd_amax, std::abs(fd));
      diff_amax = std::max(diff_amax, std::abs(fd - ga[i]));
    }
    report.max_rel_err_actor =
        std::max(report.max_rel_err_actor, diff_amax / std::max(fd_amax, 1e-12));

    // critic: d V(s) / d nu
    dvec gc(vf.net().param_count(), 0.0);
    vf.grad_value(s.data(), 1.0, ws_vf, gc.data());
    dvec& nu = vf.net().params();
    double fd_cmax = 0.0, diff_cmax = 0.0;
    for (std::size_t i = 0; i < nu.size(); i++) {
      const double orig = nu[i];
      nu[i] = orig + fd_step;
      const double up = vf.value(s.data(), ws_vf);
      nu[i] = orig - fd_step;
      const double dn = vf.value(s.data(), ws_vf);
      nu[i] = orig;
      const double fd = (up - dn) / (2.0 * fd_step);
      fd_cmax = std::max(fd_cmax, std::abs(fd));
      diff_cmax = std::max(diff_cmax, std::abs(fd - gc[i]));
    }
    report.max_rel_err_critic =
        std::max(report.max_rel_err_critic, diff_cmax / std::max(fd_cmax, 1e-12));
  }
  return report;
}

VerifySummary run_verify(const std::string& report_path) {
  VerifySummary summary;
  auto add = [&summary](const std::string& name, double value, double threshold, bool pass,
                        const std::string& detail) {
    summary.rows.push_back({name, value, threshold, pass, detail});
    summary.all_pass = summary.all_pass && pass;
    std::printf("%-34s %-5s value=%.3e threshold=%.3e %s\n", name.c_str(),
                pass ? "PASS" : "FAIL", value, threshold, detail.c_str());
  };

  // Exact importance sampling over the probability grid.
  {
    const OracleMdp mdp = oracle_mdp();
    TabularPolicy pi_b{3, 2, {0.7, 0.3, 0.4, 0.6, 0.5, 0.5}};
    TabularPolicy pi_t{3, 2, {0.55, 0.45, 0.65, 0.35, 0.25, 0.75}};
    const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0};
    double max_err = 0.0, max_norm_err = 0.0;
    for (double pb : grid) {
      if (pb >= 1.0) continue;
      for (double pt : grid) {
        auto rep = brute_force_is_check(mdp, pi_b, constant_p_schedule(pb, 1000), pi_t,
                                        constant_p_schedule(pt, 1000), 4);
        max_err = std::max(max_err, rep.max_abs_err);
        max_norm_err = std::max(max_norm_err, std::abs(rep.sum_behavior - 1.0));
        max_norm_err = std::max(max_norm_err, std::abs(rep.sum_target - 1.0));
      }
    }
    add("is_exactness_grid", max_err, 1e-12, max_err < 1e-12, "horizon 4, p grid");
    add("enumeration_normalization", max_norm_err, 1e-12, max_norm_err < 1e-12,
        "probabilities sum to 1");
  }

  // Sustain run-length distribution.
  {
    Rng rng(derive_seed(7, 0x2a));
    auto run_lengths = [&rng](double p, std::uint32_t cap, int samples) {
      SustainSchedule sched = constant_p_schedule(p, cap);
      double sum = 0.0, sumsq = 0.0;
      for (int i = 0; i < samples; i++) {
        std::uint32_t rl = 0;
        while (!should_terminate(rng, effective_p(sched, 0, rl))) rl++;
        const double len = double(rl) + 1.0;
        sum += len;
        sumsq += len * len;
      }
      const double mean = sum / samples;
      const double var = sumsq / samples - mean * mean;
      return std::pair<double, double>(mean, std::sqrt(var / samples));
    };

    const int samples = 100000;
    auto [mean_u, se_u] = run_lengths(0.25, 1000000, samples);
    const double dev_u = std::abs(mean_u - 4.0) / se_u;

    // capped truncated-geometric mean, p = 0.5, cap = 4
    double exact = 0.0;
    {
      const double p = 0.5;
      double tailp = 1.0;
      for (int k = 1; k <= 3; k++) {
        exact += k * tailp * p;
        tailp *= (1.0 - p);
      }
      exact += 4 * tailp;
    }
    auto [mean_c, se_c] = run_lengths(0.5, 4, samples);
    const double dev_c = std::abs(mean_c - exact) / se_c;

    add("sustain_mean_uncapped", dev_u, 3.0, dev_u < 3.0, "std errors from 1/p");
    add("sustain_mean_capped", dev_c, 3.0, dev_c < 3.0, "std errors from truncated mean");
  }

  // Exploration-variance conservation.
  {
    auto rep = variance_conservation_check({2.0, 4.0, 8.0}, 0.4, 200, 100000, 11);
    double worst = 0.0;
    for (double v : rep.var_scaled) worst = std::max(worst, std::abs(v / rep.baseline - 1.0));
    add("variance_scaling_on", worst, 0.25, worst < 0.25, "max |var/baseline - 1|, E in {2,4,8}");
    const double off_ratio = rep.var_unscaled.back() / rep.baseline;
    add("variance_scaling_off", off_ratio, 4.0, off_ratio >= 4.0, "var ratio at E=8, must be >= 4");
  }

  // Gradient oracle.
  {
    auto rep = gradient_suite(100, 3);
    const double worst = std::max(rep.max_rel_err_actor, rep.max_rel_err_critic);
    add("gradient_finite_difference", worst, 1e-4, worst < 1e-4, "100 random configurations");
  }

  if (!report_path.empty()) {
    nlohmann::json j;
    j["all_pass"] = summary.all_pass;
    for (const auto& row : summary.rows) {
      j["checks"].push_back({{"name", row.name},
                             {"value", row.value},
                             {"threshold", row.threshold},
                             {"pass", row.pass},
                             {"detail", row.detail}});
    }
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << j.dump(2) << "\n";
  }
  return summary;
}

}  // namespace susacer
