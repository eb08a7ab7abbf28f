#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "susacer/common.hpp"
#include "susacer/envs.hpp"
#include "susacer/sustain.hpp"

namespace susacer {

// Tabular policy over the oracle MDP; states and actions are carried as
// 1-element vectors holding indices so it plugs into the same trajectory
// machinery as the continuous policy.
struct TabularPolicy {
  struct Workspace {};

  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;  // [s][a]

  double prob(int s, int a) const { return probs[s * n_actions + a]; }
  double log_density(const double* s, const double* a, Workspace&) const {
    return std::log(prob(int(*s), int(*a)));
  }
};

struct EnumerationEntry {
  double prob_behavior = 0.0;  // full trajectory probability under behavior
  double prob_target = 0.0;
  double exact_ratio = 0.0;    // of the full trajectory
  double impl_is = 0.0;        // implementation IS at full horizon
  double abs_err = 0.0;        // max over all prefixes
};

struct EnumerationReport {
  std::vector<EnumerationEntry> entries;
  double max_abs_err = 0.0;
  double sum_behavior = 0.0;  // must be 1 over all outcomes
  double sum_target = 0.0;
};

// Enumerates every environment-level trajectory of the given horizon (first
// step fresh, then sustain/fresh events and kernel draws), computes exact
// target/behavior probability ratios, and compares them prefix by prefix
// against trajectory_is run on synthetic transition records.
EnumerationReport brute_force_is_check(const OracleMdp& mdp, const TabularPolicy& pi_behavior,
                                       const SustainSchedule& sched_behavior,
                                       const TabularPolicy& pi_target,
                                       const SustainSchedule& sched_target, int horizon);

// Convenience: constant-p schedule (infinite decay horizon).
SustainSchedule constant_p_schedule(double p, std::uint32_t cap);

struct VarianceReport {
  std::vector<double> e_values;
  std::vector<double> var_scaled;    // exploration std divided by sqrt(E)
  std::vector<double> var_unscaled;  // constant exploration std
  double baseline = 0.0;             // variance at E = 1
};

// Monte Carlo check on a 1-D linear double integrator: variance of the
// position displacement over `horizon` steps when zero-mean Gaussian
// actions are sustained with expected duration E, with and without the
// 1/sqrt(E) exploration scaling.
VarianceReport variance_conservation_check(const std::vector<double>& e_values,
                                           double sigma_base, int horizon, int trials,
                                           std::uint64_t seed);

struct GradientReport {
  double max_rel_err_actor = 0.0;
  double max_rel_err_critic = 0.0;
};

// Central-difference check of the actor and critic gradients over random
// configurations. corrupt_sign flips one analytic coordinate so tests can
// confirm the oracle itself detects errors.
GradientReport gradient_suite(int n_configs, std::uint64_t seed, double fd_step = 1e-5,
                              bool corrupt_sign = false);

struct VerifyRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifySummary {
  std::vector<VerifyRow> rows;
  bool all_pass = true;
};

// Runs the full oracle battery, prints one line per check, and writes a
// machine-readable report when report_path is non-empty.
VerifySummary run_verify(const std::string& report_path);

}  // namespace susacer
