#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "susacer/common.hpp"
#include "susacer/rng.hpp"

namespace susacer {

// One recorded environment step. The behavior policy is stored factored:
// the fresh flag says which branch of the environment-level policy produced
// the action, p_eff is the termination probability the decision was taken
// with, base_logd the base-policy log density of the executed action, and
// run_len the incumbent run length that p_eff was evaluated at (so the same
// probability is recomputable at replay time from the current schedule).
struct Transition {
  dvec s;
  dvec a;
  double reward = 0.0;
  dvec s_next;
  bool terminal = false;   // true terminal state
  bool truncated = false;  // time-limit cutoff
  bool fresh = false;      // action drawn from the base policy this step
  double p_eff = 1.0;
  double base_logd = 0.0;
  std::uint32_t run_len = 0;
  std::uint64_t t_global = 0;
};

// A window of 1..n consecutive transitions from one episode, first step
// fresh. The bootstrap state is the last step's s_next; whether it is used
// is gated by the last step's terminal flag.
struct Trajectory {
  std::vector<const Transition*> steps;

  std::size_t length() const { return steps.size(); }
  const Transition& operator[](std::size_t i) const { return *steps[i]; }
  const Transition& first() const { return *steps.front(); }
  const Transition& last() const { return *steps.back(); }
};

// Ring-buffer experience memory. Transitions are indexed by a global
// monotone sequence number; eviction is oldest-first. Trajectory sampling
// starts uniformly among fresh steps whose forward window is complete
// (n steps recorded, or the episode ends within the window).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint32_t n);

  void push(Transition tr);

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint32_t window() const { return n_; }
  std::uint64_t first_seq() const { return first_seq_; }
  std::uint64_t next_seq() const { return first_seq_ + data_.size(); }

  const Transition& at_seq(std::uint64_t seq) const;

  // Uniform draw among eligible starts; false when none exists. The filled
  // trajectory holds pointers that stay valid until the next push.
  bool sample_trajectory(Rng& rng, Trajectory& out) const;

  std::size_t eligible_start_count() const;
  std::vector<std::uint64_t> eligible_starts() const;
  const std::deque<std::uint64_t>& fresh_index() const { return fresh_index_; }

  void extract(std::uint64_t start_seq, Trajectory& out) const;

  // FNV-1a hash over all stored transitions; used to assert that evaluation
  // blocks leave the buffer untouched.
  std::uint64_t content_hash() const;

  // Debug dump, layout documented in the README.
  void dump(const std::string& path) const;

 private:
  bool tail_eligible(std::uint64_t seq) const;

  std::size_t capacity_;
  std::uint32_t n_;
  std::deque<Transition> data_;
  std::deque<std::uint64_t> fresh_index_;
  std::uint64_t first_seq_ = 0;
};

}  // namespace susacer
