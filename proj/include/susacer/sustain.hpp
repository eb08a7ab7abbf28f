#pragma once

#include <cmath>
#include <cstdint>

#include "susacer/common.hpp"
#include "susacer/rng.hpp"

namespace susacer {

// Annealing schedule for the expected duration of stochastically sustained
// actions. The expected duration decays linearly from e0 to 1 over te
// environment steps; the per-step termination probability is its inverse.
// cap bounds how many consecutive steps a single action may last.
struct SustainSchedule {
  double e0 = 1.0;       // expected action duration at step 0, >= 1
  double te = 1.0;       // decay horizon in environment steps, > 0
  std::uint32_t cap = 1; // maximum run length of one action, >= 1

  void validate() const {
    SUSACER_CHECK(e0 >= 1.0, "schedule e0 must be >= 1");
    SUSACER_CHECK(te > 0.0, "schedule te must be > 0");
    SUSACER_CHECK(cap >= 1, "schedule cap must be >= 1");
  }
};

// Tracks the sustain process within one episode. run_len counts how many
// consecutive earlier steps the incumbent action has already lasted; it is
// 0 right after a fresh draw and never reaches cap.
struct SustainState {
  std::uint32_t run_len = 0;
  bool fresh = true;
};

// Expected action duration at environment step t. Exactly 1 for t >= te.
inline double expected_duration(const SustainSchedule& s, std::uint64_t t) {
  if (double(t) >= s.te) return 1.0;
  return s.e0 + (1.0 - s.e0) * (double(t) / s.te);
}

// Termination probability at step t, the inverse of the expected duration.
inline double p_at(const SustainSchedule& s, std::uint64_t t) {
  return 1.0 / expected_duration(s, t);
}

// Termination probability actually applied at step t given how long the
// incumbent action has already run. Returns exactly 1 at the cap boundary,
// forcing the next decision to be fresh.
inline double effective_p(const SustainSchedule& s, std::uint64_t t, std::uint32_t run_len) {
  SUSACER_CHECK(run_len < s.cap, "run_len must stay below cap");
  if (run_len == s.cap - 1) return 1.0;
  return p_at(s, t);
}

// One sustain/terminate coin flip. True means the incumbent action ends and
// a fresh one must be drawn.
inline bool should_terminate(Rng& rng, double p_eff) {
  SUSACER_CHECK(p_eff > 0.0 && p_eff <= 1.0, "termination probability outside (0,1]");
  return rng.uniform01() < p_eff;
}

// Exploration scale for expected duration e: standard deviation shrinks by
// sqrt(e) so the action covariance is inversely proportional to e.
inline double sigma_scale(double e, double sigma_base) {
  SUSACER_CHECK(e >= 1.0, "expected duration must be >= 1");
  SUSACER_CHECK(sigma_base > 0.0, "sigma_base must be > 0");
  return sigma_base / std::sqrt(e);
}

}  // namespace susacer
