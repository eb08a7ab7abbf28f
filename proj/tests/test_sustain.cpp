#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "susacer/sustain.hpp"

using namespace susacer;

TEST_CASE("termination probability follows the linear duration schedule") {
  SustainSchedule s{2.0, 1e5, 4};
  CHECK(p_at(s, 0) == doctest::Approx(0.5).epsilon(1e-15));

  SustainSchedule s4{4.0, 1e5, 4};
  CHECK(expected_duration(s4, 50000) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p_at(s4, 50000) == doctest::Approx(0.4).epsilon(1e-15));

  SustainSchedule s8{8.0, 3e5, 4};
  CHECK(expected_duration(s8, 300000) == 1.0);
  CHECK(p_at(s8, 300000) == 1.0);  // exactly 1 after the decay horizon
  CHECK(p_at(s8, 400000) == 1.0);
}

TEST_CASE("p times expected duration is exactly 1 across the ablation grid") {
  for (double e0 : {2.0, 4.0, 8.0}) {
    for (double te : {3e4, 1e5, 3e5}) {
      SustainSchedule s{e0, te, 4};
      for (std::uint64_t t : {std::uint64_t(0), std::uint64_t(1), std::uint64_t(17313),
                              std::uint64_t(te / 2), std::uint64_t(te - 1), std::uint64_t(te),
                              std::uint64_t(2 * te)}) {
        const double p = p_at(s, t);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        CHECK(p * expected_duration(s, t) == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("p is non-decreasing and constant after the horizon") {
  SustainSchedule s{8.0, 3e4, 4};
  double prev = 0.0;
  for (std::uint64_t t = 0; t <= 40000; t += 500) {
    const double p = p_at(s, t);
    CHECK(p >= prev);
    prev = p;
  }
  CHECK(p_at(s, 30000) == 1.0);
  CHECK(p_at(s, 30001) == 1.0);
}

TEST_CASE("effective_p forces a fresh decision at the cap") {
  SustainSchedule s{2.0, 1e5, 4};
  CHECK(effective_p(s, 0, 3) == 1.0);
  CHECK(effective_p(s, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(effective_p(s, 0, 4), std::logic_error);

  SustainSchedule cap1{2.0, 1e5, 1};
  CHECK(effective_p(cap1, 0, 0) == 1.0);  // cap 1 degenerates to per-step decisions
}

TEST_CASE("should_terminate is deterministic and certain at p = 1") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; i++) CHECK(should_terminate(a, 1.0));
  a = Rng(42);
  for (int i = 0; i < 1000; i++) CHECK(should_terminate(a, 0.3) == should_terminate(b, 0.3));
}

namespace {

// Samples one run length: selection step plus sustains until termination.
double sample_run_length(Rng& rng, const SustainSchedule& s) {
  std::uint32_t rl = 0;
  while (!should_terminate(rng, effective_p(s, 0, rl))) rl++;
  return double(rl) + 1.0;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mc_run_length(double p, std::uint32_t cap, int samples, std::uint64_t seed) {
  SustainSchedule s{1.0 / p, std::numeric_limits<double>::infinity(), cap};
  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < samples; i++) {
    const double len = sample_run_length(rng, s);
    sum += len;
    sumsq += len * len;
  }
  const double mean = sum / samples;
  const double var = sumsq / samples - mean * mean;
  return {mean, std::sqrt(var / samples)};
}

}  // namespace

TEST_CASE("capped run lengths follow the truncated geometric distribution") {
  // p = 0.5, cap = 4: pmf (0.5, 0.25, 0.125, 0.125) over lengths 1..4.
  const double p = 0.5;
  double pmf[4] = {0.5, 0.25, 0.125, 0.125};
  double exact_mean = 0.0;
  for (int k = 0; k < 4; k++) exact_mean += (k + 1) * pmf[k];
  CHECK(exact_mean == doctest::Approx(1.875).epsilon(1e-15));

  // frequency check of the pmf itself
  SustainSchedule s{1.0 / p, std::numeric_limits<double>::infinity(), 4};
  Rng rng(7);
  const int n = 1000000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; i++) counts[int(sample_run_length(rng, s)) - 1]++;
  for (int k = 0; k < 4; k++) {
    const double se = std::sqrt(pmf[k] * (1 - pmf[k]) / n);
    CHECK(std::abs(double(counts[k]) / n - pmf[k]) < 4 * se);
  }

  const MeanSe mc = mc_run_length(p, 4, 1000000, 11);
  CHECK(std::abs(mc.mean - exact_mean) < 3 * mc.se);
}

TEST_CASE("uncapped mean run length approaches 1/p") {
  const MeanSe mc = mc_run_length(0.25, 1000000, 100000, 3);
  CHECK(std::abs(mc.mean - 4.0) < 3 * mc.se);
}

TEST_CASE("exploration scale keeps covariance inversely proportional to duration") {
  CHECK(sigma_scale(1.0, 0.4) == 0.4);
  CHECK(sigma_scale(4.0, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(sigma_scale(2.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  for (double e : {1.0, 1.5, 2.0, 4.0, 8.0, 64.0}) {
    const double sg = sigma_scale(e, 0.4);
    CHECK(sg * sg * e == doctest::Approx(0.16).epsilon(1e-15));
  }
  CHECK_THROWS_AS(sigma_scale(0.5, 0.4), std::logic_error);
  CHECK_THROWS_AS(sigma_scale(2.0, 0.0), std::logic_error);
}
