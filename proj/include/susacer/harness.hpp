#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susacer/acer.hpp"
#include "susacer/config.hpp"

namespace susacer {

struct EvalPoint {
  std::uint64_t step = 0;
  double mean_return = 0.0;
  dvec episode_returns;
};

struct RunRecord {
  std::vector<EvalPoint> points;
  double aulc = 0.0;
  double final_score = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config_snapshot;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;  // thread CPU time of the run
  double max_abs_rho = 0.0;  // largest truncated weight seen during training
};

// Full training run: interleaves environment interaction, replay updates
// and periodic frozen-weight evaluations (step 0 included). Deterministic
// given (config, seed). Writes run.csv and checkpoints when out_dir is set.
RunRecord train(const RunConfig& cfg);

// Frozen-policy evaluation: per-step mean actions, no sustain, no learning.
dvec evaluate_policy(const GaussianPolicy& pi, const RunConfig& cfg, int episodes, Rng& rng);

// Mean of the per-evaluation mean returns (uniform eval spacing makes this
// proportional to the area under the learning curve).
double aulc(const RunRecord& rec);

void emit_csv(const RunRecord& rec, const std::string& path);

struct CsvData {
  std::vector<std::uint64_t> steps;
  dvec mean_returns;
  std::vector<dvec> episodes;  // per eval point
};
CsvData parse_csv(const std::string& path);

// Learning-curve plot: mean line with a +-sd band across the given runs,
// which must share the same evaluation grid. Single self-contained SVG.
void emit_svg(const std::vector<CsvData>& runs, const std::string& path,
              const std::string& title);

struct SweepCell {
  double e0 = 0.0;
  double te = 0.0;
  std::vector<RunRecord> runs;  // one per seed
  double final_mean = 0.0, final_sd = 0.0;
  double aulc_mean = 0.0, aulc_sd = 0.0;
  double max_wall_seconds = 0.0;
  double max_cpu_seconds = 0.0;
};

struct SweepTable {
  std::vector<SweepCell> cells;
  std::size_t best_index = 0;  // largest mean area under the curve
};

// Cartesian (e0, te) grid across seeds; independent runs, optionally in
// parallel. e0 = 1 cells degenerate to the per-step baseline.
SweepTable sweep(const RunConfig& base, const std::vector<double>& e0s,
                 const std::vector<double>& tes, const std::vector<std::uint64_t>& seeds,
                 int jobs = 1, bool progress = false);

// sweep.csv plus a markdown report with the best cell bolded; per-run CSVs
// alongside when write_runs is set.
void emit_sweep(const SweepTable& table, const std::string& dir, bool write_runs = true);

}  // namespace susacer
