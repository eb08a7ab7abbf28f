#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "susacer/common.hpp"

namespace susacer {

// splitmix64; used to derive independent seeds for sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  return splitmix64(s);
}

// Deterministic random source. All draw algorithms are written out here so
// the stream does not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform01() {
    return double(gen_() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1]
  double uniform01_open_low() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal, Box-Muller with one cached value
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01_open_low();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform integer in [0, n); fixed single-draw consumption
  std::size_t uniform_index(std::size_t n) {
    SUSACER_CHECK(n > 0, "uniform_index over empty range");
    std::size_t k = std::size_t(uniform01() * double(n));
    return k >= n ? n - 1 : k;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace susacer
