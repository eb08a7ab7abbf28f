#pragma once

#include <cstdint>
#include <vector>

#include "susacer/common.hpp"
#include "susacer/mlp.hpp"
#include "susacer/rng.hpp"

namespace susacer {

// Diagonal-Gaussian policy: an MLP produces the mean, the per-dimension
// standard deviation is held outside the learned parameters and set by the
// exploration schedule.
class GaussianPolicy {
 public:
  using Workspace = MlpWorkspace;

  GaussianPolicy() = default;
  GaussianPolicy(int state_dim, const std::vector<int>& hidden, int action_dim);

  void init_params(Rng& rng, double output_scale = 0.01);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  void set_sigma(double sigma);
  void set_sigma(const dvec& sigma);
  const dvec& sigma() const { return sigma_; }

  Mlp& mean_net() { return net_; }
  const Mlp& mean_net() const { return net_; }

  MlpWorkspace make_workspace(int max_batch = 1) const { return net_.make_workspace(max_batch); }

  // Mean action for one state; returns a pointer into ws.
  const double* mean(const double* s, MlpWorkspace& ws) const { return net_.forward(s, 1, ws); }

  double log_density(const double* s, const double* a, MlpWorkspace& ws) const;

  // Log density given a precomputed mean (avoids a second forward).
  double log_density_from_mean(const double* mu, const double* a) const;

  void sample(const double* s, Rng& rng, double* a, MlpWorkspace& ws) const;

  // Accumulates scale * d(ln pi(a|s)) / d(theta) into gtheta.
  void grad_log_density(const double* s, const double* a, double scale, MlpWorkspace& ws,
                        double* gtheta) const;

 private:
  int state_dim_ = 0;
  int action_dim_ = 0;
  Mlp net_;
  dvec sigma_;
  dvec inv_var_;
  double log_norm_ = 0.0;  // sum_i(-ln sigma_i) - dim/2 * ln(2*pi)
};

// State-value estimator V(s): an MLP with a scalar output.
class ValueFunction {
 public:
  using Workspace = MlpWorkspace;

  ValueFunction() = default;
  ValueFunction(int state_dim, const std::vector<int>& hidden);

  void init_params(Rng& rng, double output_scale = 0.01);

  int state_dim() const { return state_dim_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  MlpWorkspace make_workspace(int max_batch = 1) const { return net_.make_workspace(max_batch); }

  double value(const double* s, MlpWorkspace& ws) const { return net_.forward(s, 1, ws)[0]; }

  // Batched values for k states (row-major); returns pointer to k scalars.
  const double* values(const double* s, int k, MlpWorkspace& ws) const {
    return net_.forward(s, k, ws);
  }

  // Accumulates scale * dV(s)/d(nu) into gnu.
  void grad_value(const double* s, double scale, MlpWorkspace& ws, double* gnu) const;

 private:
  int state_dim_ = 0;
  Mlp net_;
};

// ADAM accumulator for one parameter vector. Updates apply ascent
// directions: params move along the sign of the (bias-corrected) gradient.
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t n, double step_size)
      : m(n, 0.0), v(n, 0.0), alpha(step_size) {}

  dvec m, v;
  std::uint64_t step = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(AdamState& st, dvec& params, const dvec& grad);

}  // namespace susacer
