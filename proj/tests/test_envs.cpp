#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "susacer/envs.hpp"
#include "susacer/sustain.hpp"

using namespace susacer;

TEST_CASE("point mass resets uniformly in the arena with zero velocity") {
  Environment env = Environment::make("point_mass");
  Rng rng(1);
  double min_x = 1e9, max_x = -1e9, mean_x = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; i++) {
    dvec s = env.reset(rng);
    CHECK(s[2] == 0.0);
    CHECK(s[3] == 0.0);
    CHECK(s[0] >= -1.0);
    CHECK(s[0] <= 1.0);
    min_x = std::min(min_x, s[0]);
    max_x = std::max(max_x, s[0]);
    mean_x += s[0];
  }
  mean_x /= n;
  CHECK(min_x < -0.99);
  CHECK(max_x > 0.99);
  CHECK(std::abs(mean_x) < 4.0 / std::sqrt(3.0 * n));  // se of uniform mean
}

TEST_CASE("pendulum resets in the documented ranges") {
  Environment env = Environment::make("pendulum");
  Rng rng(2);
  for (int i = 0; i < 5000; i++) {
    env.reset(rng);
    const dvec& s = env.phys_state();
    CHECK(s[0] >= -M_PI);
    CHECK(s[0] <= M_PI);
    CHECK(s[1] >= -1.0);
    CHECK(s[1] <= 1.0);
  }
}

TEST_CASE("reset is deterministic given the seed") {
  Environment a = Environment::make("pendulum");
  Environment b = Environment::make("pendulum");
  Rng ra(7), rb(7);
  CHECK(a.reset(ra) == b.reset(rb));
  CHECK(a.reset(ra) == b.reset(rb));
}

TEST_CASE("point mass equilibrium holds under zero action") {
  PointMassTask task;
  dvec s = {0.5, -0.4, 0.0, 0.0};
  PhysStep out = step_physics(task, s, {0.0, 0.0}, 0.01, 1);
  CHECK(out.state[0] == 0.5);
  CHECK(out.state[1] == -0.4);
}

TEST_CASE("point mass velocity integrates a constant action linearly") {
  Environment env = Environment::make("point_mass", 0.01, 2);
  Rng rng(3);
  env.reset(rng);
  const dvec a = {0.7, -0.3};
  const int k = 25;
  for (int i = 0; i < k; i++) env.step(a);
  const dvec& s = env.phys_state();
  CHECK(s[2] == doctest::Approx(k * 0.01 * 2 * 0.7).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(k * 0.01 * 2 * -0.3).epsilon(1e-12));
}

TEST_CASE("one step at sub_steps=4 equals four steps at sub_steps=1") {
  for (const char* name : {"point_mass", "pendulum"}) {
    PointMassTask pm;
    PendulumTask pd;
    const Task& task = std::string(name) == "point_mass" ? (const Task&)pm : (const Task&)pd;
    Rng rng(11);
    dvec s0 = task.initial_state(rng);
    dvec a = task.action_high();
    for (double& v : a) v *= 0.37;

    PhysStep coarse = step_physics(task, s0, a, 0.01, 4);
    dvec s = s0;
    double reward = 0.0;
    for (int i = 0; i < 4; i++) {
      PhysStep fine = step_physics(task, s, a, 0.01, 1);
      s = fine.state;
      reward += fine.reward;
    }
    for (std::size_t i = 0; i < s.size(); i++)
      CHECK(coarse.state[i] == doctest::Approx(s[i]).epsilon(1e-12));
    CHECK(coarse.reward == doctest::Approx(reward).epsilon(1e-12));
  }
}

TEST_CASE("free pendulum conserves energy to first order") {
  PendulumTask task;
  dvec s = {M_PI - 0.2, 0.0};  // oscillation about the hanging equilibrium
  const double e0 = PendulumTask::energy(s);
  double max_drift = 0.0;
  for (int i = 0; i < 1000; i++) {
    PhysStep out = step_physics(task, s, {0.0}, 1e-3, 1);
    s = out.state;
    max_drift = std::max(max_drift, std::abs(PendulumTask::energy(s) - e0));
  }
  CHECK(max_drift < 1e-3);
}

TEST_CASE("energy error stays bounded on large swings, no secular drift") {
  PendulumTask task;
  dvec s = {2.4, 0.3};
  const double e0 = PendulumTask::energy(s);
  double max_dev = 0.0;
  double early = 0.0, late = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; i++) {
    PhysStep out = step_physics(task, s, {0.0}, 1e-3, 1);
    s = out.state;
    const double e = PendulumTask::energy(s);
    max_dev = std::max(max_dev, std::abs(e - e0));
    if (i < 1000) early += e;
    if (i >= n - 1000) late += e;
  }
  CHECK(max_dev < 0.05);                                    // bounded oscillation
  CHECK(std::abs(late - early) / 1000.0 < 5e-3);            // no trend over 20x the window
}

TEST_CASE("terminal and truncated are mutually exclusive; truncation at the limit") {
  Environment env = Environment::make("pendulum", 0.01, 1, 50);
  Rng rng(5);
  env.reset(rng);
  for (int i = 0; i < 49; i++) {
    StepResult r = env.step({0.0});
    CHECK(!r.terminal);
    CHECK(!r.truncated);
  }
  StepResult last = env.step({0.0});
  CHECK(!last.terminal);
  CHECK(last.truncated);
}

TEST_CASE("point mass terminates inside the goal radius") {
  Environment env = Environment::make("point_mass");
  Rng rng(8);
  dvec obs = env.reset(rng);
  // drive straight at the origin with a bang-bang controller
  for (int i = 0; i < 300; i++) {
    const dvec& s = env.phys_state();
    dvec a = {-(s[0] * 2.0 + s[2] * 3.0), -(s[1] * 2.0 + s[3] * 3.0)};
    StepResult r = env.step(a);
    CHECK(!(r.terminal && r.truncated));
    if (r.terminal) {
      const dvec& fs = env.phys_state();
      CHECK(std::sqrt(fs[0] * fs[0] + fs[1] * fs[1]) <= PointMassTask::kGoalRadius);
      return;
    }
    if (r.truncated) break;
  }
  FAIL("controller should reach the goal within the limit");
}

TEST_CASE("rewards stay bounded over full episodes") {
  for (const char* name : {"point_mass", "pendulum"}) {
    Environment env = Environment::make(name);
    Rng rng(13);
    env.reset(rng);
    dvec a = env.spec().action_high;
    while (true) {
      StepResult r = env.step(a);
      CHECK(std::isfinite(r.reward));
      CHECK(std::abs(r.reward) < 10.0);  // per-step reward is a rate times h
      if (r.terminal || r.truncated) break;
    }
  }
}

TEST_CASE("non-finite inputs are rejected") {
  PointMassTask task;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step_physics(task, {nan, 0, 0, 0}, {0, 0}, 0.01, 1), std::logic_error);
  CHECK_THROWS_AS(step_physics(task, {0, 0, 0, 0}, {nan, 0}, 0.01, 1), std::logic_error);
}

TEST_CASE("oracle mdp tables are stochastic") {
  OracleMdp m = oracle_mdp();
  CHECK(m.n_states == 3);
  CHECK(m.n_actions == 2);
  for (int s = 0; s < m.n_states; s++)
    for (int a = 0; a < m.n_actions; a++) {
      double sum = 0.0;
      for (int s2 = 0; s2 < m.n_states; s2++) {
        CHECK(m.p(s, a, s2) >= 0.0);
        sum += m.p(s, a, s2);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
}

namespace {

// Finite-horizon value of the sustained process by backward induction over
// (state, incumbent action); fresh draws use the tabular policy.
double sustained_value(const OracleMdp& m, const std::vector<double>& pi, double p, int horizon) {
  const int S = m.n_states, A = m.n_actions;
  // v[k][s][a_inc]: reward-to-go with k steps left, incumbent a_inc
  std::vector<double> v(S * A, 0.0), vnext(S * A, 0.0);
  auto fresh_value = [&](int s, const std::vector<double>& vn) {
    double acc = 0.0;
    for (int a = 0; a < A; a++) {
      double cont = m.r(s, a);
      for (int s2 = 0; s2 < S; s2++) cont += m.p(s, a, s2) * vn[s2 * A + a];
      acc += pi[s * A + a] * cont;
    }
    return acc;
  };
  for (int k = 0; k < horizon - 1; k++) {
    for (int s = 0; s < S; s++)
      for (int ai = 0; ai < A; ai++) {
        double sustain = m.r(s, ai);
        for (int s2 = 0; s2 < S; s2++) sustain += m.p(s, ai, s2) * v[s2 * A + ai];
        vnext[s * A + ai] = (1.0 - p) * sustain + p * fresh_value(s, v);
      }
    std::swap(v, vnext);
  }
  return fresh_value(m.start_state, v);  // the first step is always fresh
}

}  // namespace

TEST_CASE("backward-induction value matches a Monte Carlo rollout") {
  OracleMdp m = oracle_mdp();
  const std::vector<double> pi = {0.6, 0.4, 0.3, 0.7, 0.5, 0.5};
  const double p = 0.4;
  const int horizon = 6;
  const double exact = sustained_value(m, pi, p, horizon);

  Rng rng(101);
  auto sample_categorical = [&rng](const double* probs, int n) {
    double u = rng.uniform01();
    for (int i = 0; i < n; i++) {
      u -= probs[i];
      if (u < 0) return i;
    }
    return n - 1;
  };

  const int trials = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int trial = 0; trial < trials; trial++) {
    int s = m.start_state;
    int a = -1;
    double total = 0.0;
    for (int t = 0; t < horizon; t++) {
      if (a < 0 || should_terminate(rng, p))
        a = sample_categorical(&pi[s * m.n_actions], m.n_actions);
      total += m.r(s, a);
      s = sample_categorical(&m.trans[(s * m.n_actions + a) * m.n_states], m.n_states);
    }
    sum += total;
    sumsq += total * total;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - exact) < 3 * se);
}
