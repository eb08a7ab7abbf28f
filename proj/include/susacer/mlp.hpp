#pragma once

#include <cstddef>
#include <vector>

#include "susacer/common.hpp"
#include "susacer/rng.hpp"

namespace susacer {

// Scratch buffers for forward/backward passes. One workspace per thread of
// use; reused across calls to avoid allocation in the training loop.
struct MlpWorkspace {
  std::vector<dvec> h;  // per layer, batch-major post-activations
  dvec d0, d1;          // backward deltas
  dvec gy;              // output-gradient scratch for callers
  int batch = 0;        // rows of the most recent forward
};

// Fully connected network with tanh hidden activations and a linear output
// layer. Parameters live in one flat vector laid out layer by layer as
// weights then biases; weights of a layer with fan_in inputs and fan_out
// outputs are stored input-major, w[i * fan_out + o].
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  // Fan-in-scaled uniform weights, zero biases. The output layer's weights
  // are multiplied by output_scale.
  void init_params(Rng& rng, double output_scale = 1.0);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }

  dvec& params() { return params_; }
  const dvec& params() const { return params_; }

  MlpWorkspace make_workspace(int max_batch = 1) const;

  // Forward pass for k inputs (row-major k x input_dim). Returns a pointer
  // to the k x output_dim output block inside ws; activations remain cached
  // in ws for a subsequent backward.
  const double* forward(const double* x, int k, MlpWorkspace& ws) const;

  double forward1(const double* x, MlpWorkspace& ws) const {
    SUSACER_CHECK(output_dim() == 1, "forward1 needs a scalar output");
    return forward(x, 1, ws)[0];
  }

  // Accumulates into gparams the gradient of sum_j gy[j] * y_row[j] with
  // respect to the parameters, using the activations of batch row `row`
  // cached by the latest forward. x must be the same pointer passed there.
  void backward(const double* x, const double* gy, int row, MlpWorkspace& ws,
                double* gparams) const;

 private:
  std::vector<int> sizes_;
  dvec params_;
  std::vector<std::size_t> w_off_, b_off_;  // per-layer offsets into params_
};

}  // namespace susacer
