#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "susacer/common.hpp"

namespace susacer {

// On-disk parameter snapshot for one network: a small header (layer sizes,
// exploration std vector, optimizer step counter) followed by the flat
// parameter vector as 64-bit floats. Exact byte layout in the README.
struct Checkpoint {
  std::vector<int> layer_sizes;
  dvec sigma;  // empty for the critic
  std::uint64_t step = 0;
  dvec params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace susacer
