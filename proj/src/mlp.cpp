#include "susacer/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "susacer/tanh_map.hpp"

namespace susacer {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  SUSACER_CHECK(sizes_.size() >= 2, "need at least input and output layer");
  for (int s : sizes_) SUSACER_CHECK(s > 0, "layer sizes must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); l++) {
    w_off_.push_back(total);
    total += std::size_t(sizes_[l]) * sizes_[l + 1];
    b_off_.push_back(total);
    total += sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::init_params(Rng& rng, double output_scale) {
  const std::size_t n_layers = w_off_.size();
  for (std::size_t l = 0; l < n_layers; l++) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(double(fan_in));
    const double scale = (l + 1 == n_layers) ? output_scale : 1.0;
    double* w = params_.data() + w_off_[l];
    for (int i = 0; i < fan_in * fan_out; i++) w[i] = scale * rng.uniform(-bound, bound);
    double* b = params_.data() + b_off_[l];
    std::fill(b, b + fan_out, 0.0);
  }
}

MlpWorkspace Mlp::make_workspace(int max_batch) const {
  MlpWorkspace ws;
  ws.h.resize(w_off_.size());
  for (std::size_t l = 0; l < w_off_.size(); l++)
    ws.h[l].assign(std::size_t(max_batch) * sizes_[l + 1], 0.0);
  const int widest = *std::max_element(sizes_.begin(), sizes_.end());
  ws.d0.assign(widest, 0.0);
  ws.d1.assign(widest, 0.0);
  ws.gy.assign(sizes_.back(), 0.0);
  return ws;
}

namespace {

// y = b + W^T x with the weight rows walked four inputs at a time.
void affine_row(const double* __restrict w, const double* __restrict b,
                const double* __restrict x, double* __restrict y, int ni, int no) {
  for (int o = 0; o < no; o++) y[o] = b[o];
  int i = 0;
  for (; i + 4 <= ni; i += 4) {
    const double x0 = x[i], x1 = x[i + 1], x2 = x[i + 2], x3 = x[i + 3];
    const double* w0 = w + std::size_t(i) * no;
    const double* w1 = w0 + no;
    const double* w2 = w1 + no;
    const double* w3 = w2 + no;
    for (int o = 0; o < no; o++) y[o] += x0 * w0[o] + x1 * w1[o] + x2 * w2[o] + x3 * w3[o];
  }
  for (; i < ni; i++) {
    const double xi = x[i];
    const double* wr = w + std::size_t(i) * no;
    for (int o = 0; o < no; o++) y[o] += xi * wr[o];
  }
}

}  // namespace

const double* Mlp::forward(const double* x, int k, MlpWorkspace& ws) const {
  const std::size_t n_layers = w_off_.size();
  SUSACER_CHECK(ws.h.size() == n_layers, "workspace layer count mismatch");
  SUSACER_CHECK(std::size_t(k) * sizes_[1] <= ws.h[0].size(), "workspace batch too small");
  ws.batch = k;
  const double* in = x;
  for (std::size_t l = 0; l < n_layers; l++) {
    const int ni = sizes_[l];
    const int no = sizes_[l + 1];
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    double* out = ws.h[l].data();
    for (int r = 0; r < k; r++)
      affine_row(w, b, in + std::size_t(r) * ni, out + std::size_t(r) * no, ni, no);
    if (l + 1 < n_layers) tanh_map(out, out, std::size_t(k) * no);
    in = out;
  }
  return ws.h.back().data();
}

void Mlp::backward(const double* x, const double* gy, int row, MlpWorkspace& ws,
                   double* gparams) const {
  const std::size_t n_layers = w_off_.size();
  SUSACER_CHECK(row >= 0 && row < ws.batch, "backward row outside the last forward batch");
  dvec& dcur = ws.d0;
  dvec& dprev = ws.d1;
  dcur.assign(dcur.size(), 0.0);
  std::copy(gy, gy + sizes_.back(), dcur.begin());

  for (std::size_t l = n_layers; l-- > 0;) {
    const int ni = sizes_[l];
    const int no = sizes_[l + 1];
    const double* __restrict w = params_.data() + w_off_[l];
    const double* __restrict in = (l == 0) ? x + std::size_t(row) * ni
                                           : ws.h[l - 1].data() + std::size_t(row) * ni;
    double* __restrict gw = gparams + w_off_[l];
    double* __restrict gb = gparams + b_off_[l];
    const double* __restrict d = dcur.data();

    for (int i = 0; i < ni; i++) {
      const double xi = in[i];
      double* __restrict gwr = gw + std::size_t(i) * no;
      for (int o = 0; o < no; o++) gwr[o] += xi * d[o];
    }
    for (int o = 0; o < no; o++) gb[o] += d[o];

    if (l == 0) break;

    // delta for the previous layer: (W d) * tanh'(h_{l-1})
    double* __restrict dp = dprev.data();
    for (int i = 0; i < ni; i++) {
      const double* __restrict wr = w + std::size_t(i) * no;
      double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
      int o = 0;
      for (; o + 8 <= no; o += 8)
        for (int j = 0; j < 8; j++) acc[j] += wr[o + j] * d[o + j];
      double s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
      for (; o < no; o++) s += wr[o] * d[o];
      const double hi = in[i];
      dp[i] = s * (1.0 - hi * hi);
    }
    std::swap(dcur, dprev);
  }
}

}  // namespace susacer
