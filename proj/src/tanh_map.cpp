#include "susacer/tanh_map.hpp"

#include <cmath>

namespace susacer {

void tanh_map(const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; i++) y[i] = std::tanh(x[i]);
}

}  // namespace susacer
