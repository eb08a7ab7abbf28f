#include "susacer/approximator.hpp"

#include <cmath>

namespace susacer {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::vector<int> full_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}
}  // namespace

GaussianPolicy::GaussianPolicy(int state_dim, const std::vector<int>& hidden, int action_dim)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      net_(full_sizes(state_dim, hidden, action_dim)) {
  set_sigma(1.0);
}

void GaussianPolicy::init_params(Rng& rng, double output_scale) {
  net_.init_params(rng, output_scale);
}

void GaussianPolicy::set_sigma(double sigma) { set_sigma(dvec(action_dim_, sigma)); }

void GaussianPolicy::set_sigma(const dvec& sigma) {
  SUSACER_CHECK(int(sigma.size()) == action_dim_, "sigma dimension mismatch");
  for (double s : sigma) SUSACER_CHECK(s > 0.0, "sigma entries must be > 0");
  sigma_ = sigma;
  inv_var_.resize(sigma.size());
  log_norm_ = -0.5 * action_dim_ * kLog2Pi;
  for (std::size_t i = 0; i < sigma.size(); i++) {
    inv_var_[i] = 1.0 / (sigma[i] * sigma[i]);
    log_norm_ -= std::log(sigma[i]);
  }
}

double GaussianPolicy::log_density_from_mean(const double* mu, const double* a) const {
  double q = 0.0;
  for (int i = 0; i < action_dim_; i++) {
    const double d = a[i] - mu[i];
    q += d * d * inv_var_[i];
  }
  return log_norm_ - 0.5 * q;
}

double GaussianPolicy::log_density(const double* s, const double* a, MlpWorkspace& ws) const {
  const double* mu = net_.forward(s, 1, ws);
  return log_density_from_mean(mu, a);
}

void GaussianPolicy::sample(const double* s, Rng& rng, double* a, MlpWorkspace& ws) const {
  const double* mu = net_.forward(s, 1, ws);
  for (int i = 0; i < action_dim_; i++) a[i] = mu[i] + sigma_[i] * rng.normal();
}

void GaussianPolicy::grad_log_density(const double* s, const double* a, double scale,
                                      MlpWorkspace& ws, double* gtheta) const {
  const double* mu = net_.forward(s, 1, ws);
  for (int i = 0; i < action_dim_; i++) ws.gy[i] = scale * (a[i] - mu[i]) * inv_var_[i];
  net_.backward(s, ws.gy.data(), 0, ws, gtheta);
}

ValueFunction::ValueFunction(int state_dim, const std::vector<int>& hidden)
    : state_dim_(state_dim), net_(full_sizes(state_dim, hidden, 1)) {}

void ValueFunction::init_params(Rng& rng, double output_scale) {
  net_.init_params(rng, output_scale);
}

void ValueFunction::grad_value(const double* s, double scale, MlpWorkspace& ws,
                               double* gnu) const {
  net_.forward(s, 1, ws);
  const double gy = scale;
  net_.backward(s, &gy, 0, ws, gnu);
}

void adam_step(AdamState& st, dvec& params, const dvec& grad) {
  SUSACER_CHECK(params.size() == grad.size() && params.size() == st.m.size(),
                "adam shape mismatch");
  st.step += 1;
  const double b1t = 1.0 - std::pow(st.beta1, double(st.step));
  const double b2t = 1.0 - std::pow(st.beta2, double(st.step));
  const std::size_t n = params.size();
  for (std::size_t i = 0; i < n; i++) {
    const double g = grad[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double mhat = st.m[i] / b1t;
    const double vhat = st.v[i] / b2t;
    params[i] += st.alpha * mhat / (std::sqrt(vhat) + st.eps);
  }
}

}  // namespace susacer
