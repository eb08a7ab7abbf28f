#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace susacer {

using dvec = std::vector<double>;

// Contract checks stay on in release builds.
[[noreturn]] inline void contract_fail(const char* expr, const char* file, int line,
                                       const std::string& msg) {
  throw std::logic_error(std::string("contract violation: ") + expr + " at " + file + ":" +
                         std::to_string(line) + (msg.empty() ? "" : (", " + msg)));
}

#define SUSACER_CHECK(cond, msg)                                               \
  do {                                                                         \
    if (!(cond)) ::susacer::contract_fail(#cond, __FILE__, __LINE__, (msg));   \
  } while (0)

}  // namespace susacer
