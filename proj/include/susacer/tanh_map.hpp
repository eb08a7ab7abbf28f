#pragma once

#include <cstddef>

namespace susacer {

// Elementwise y[i] = tanh(x[i]). Lives in its own translation unit compiled
// with vector-math flags; accuracy matches libm tanh to within 2 ulp.
void tanh_map(const double* x, double* y, std::size_t n);

}  // namespace susacer
