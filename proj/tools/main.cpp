#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "susacer/checkpoint.hpp"
#include "susacer/config.hpp"
#include "susacer/harness.hpp"
#include "susacer/verify.hpp"

namespace {

susacer::KvConfig load_kv(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  susacer::KvConfig kv;
  if (!config_path.empty()) kv = susacer::KvConfig::from_file(config_path);
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got: " + ov);
    kv.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
  return kv;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw std::runtime_error("empty list: " + s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"susacer: off-policy actor-critic with stochastically sustained actions"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_path = "verify_report.json", title = "learning curve";
  std::vector<std::string> overrides, plot_inputs;
  std::string e0_list = "2", te_list, ckpt_dir = ".";
  std::uint64_t seed = std::uint64_t(-1);
  int n_seeds = 1, jobs = 1, episodes = 5;
  std::string plot_out = "curve.svg";

  auto* cmd_train = app.add_subcommand("train", "run one training run");
  cmd_train->add_option("--config", config_path, "configuration file");
  cmd_train->add_option("--seed", seed, "seed override");
  cmd_train->add_option("--out", out_dir, "output directory override");
  cmd_train->add_option("--set", overrides, "key=value override, repeatable");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a saved actor checkpoint");
  cmd_eval->add_option("--config", config_path, "configuration file");
  cmd_eval->add_option("--ckpt", ckpt_dir, "directory holding actor.ckpt");
  cmd_eval->add_option("--episodes", episodes, "evaluation episodes");
  cmd_eval->add_option("--seed", seed, "seed override");
  cmd_eval->add_option("--set", overrides, "key=value override, repeatable");

  auto* cmd_sweep = app.add_subcommand("sweep", "ablation grid over (e0, te) and seeds");
  cmd_sweep->add_option("--config", config_path, "base configuration file");
  cmd_sweep->add_option("--e0", e0_list, "comma list of initial expected durations");
  cmd_sweep->add_option("--te", te_list, "comma list of decay horizons");
  cmd_sweep->add_option("--seeds", n_seeds, "number of seeds (base seed, base+1, ...)");
  cmd_sweep->add_option("--jobs", jobs, "parallel runs");
  cmd_sweep->add_option("--out", out_dir, "output directory");
  cmd_sweep->add_option("--seed", seed, "base seed override");
  cmd_sweep->add_option("--set", overrides, "key=value override, repeatable");

  auto* cmd_verify = app.add_subcommand("verify", "run the oracle battery");
  cmd_verify->add_option("--report", report_path, "machine-readable report path");

  auto* cmd_plot = app.add_subcommand("plot", "learning-curve SVG from run CSVs");
  cmd_plot->add_option("--in", plot_inputs, "input run.csv, repeatable")->required();
  cmd_plot->add_option("--out", plot_out, "output SVG path");
  cmd_plot->add_option("--title", title, "plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) {
      susacer::KvConfig kv = load_kv(config_path, overrides);
      susacer::RunConfig cfg = susacer::RunConfig::from_kv(kv);
      if (seed != std::uint64_t(-1)) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      susacer::RunRecord rec = susacer::train(cfg);
      std::printf("final=%.6f aulc=%.6f points=%zu wall=%.1fs\n", rec.final_score, rec.aulc,
                  rec.points.size(), rec.wall_seconds);
      return 0;
    }

    if (cmd_eval->parsed()) {
      susacer::KvConfig kv = load_kv(config_path, overrides);
      susacer::RunConfig cfg = susacer::RunConfig::from_kv(kv);
      if (seed != std::uint64_t(-1)) cfg.seed = seed;
      susacer::Checkpoint ck = susacer::load_checkpoint(ckpt_dir + "/actor.ckpt");
      const auto& sizes = ck.layer_sizes;
      std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
      susacer::GaussianPolicy pi(sizes.front(), hidden, sizes.back());
      pi.mean_net().params() = ck.params;
      if (!ck.sigma.empty()) pi.set_sigma(ck.sigma);
      susacer::Rng rng(susacer::derive_seed(cfg.seed, 0xEA11));
      susacer::dvec returns = susacer::evaluate_policy(pi, cfg, episodes, rng);
      double sum = 0.0;
      for (double r : returns) sum += r;
      std::printf("mean_return=%.6f over %d episodes\n", sum / returns.size(), episodes);
      for (std::size_t i = 0; i < returns.size(); i++)
        std::printf("  ep%zu=%.6f\n", i + 1, returns[i]);
      return 0;
    }

    if (cmd_sweep->parsed()) {
      susacer::KvConfig kv = load_kv(config_path, overrides);
      susacer::RunConfig cfg = susacer::RunConfig::from_kv(kv);
      if (seed != std::uint64_t(-1)) cfg.seed = seed;
      const std::vector<double> e0s = parse_double_list(e0_list);
      const std::vector<double> tes =
          te_list.empty() ? std::vector<double>{cfg.agent.schedule.te} : parse_double_list(te_list);
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < n_seeds; i++) seeds.push_back(cfg.seed + std::uint64_t(i));
      susacer::SweepTable table = susacer::sweep(cfg, e0s, tes, seeds, jobs, true);
      if (out_dir.empty()) out_dir = "sweep_out";
      susacer::emit_sweep(table, out_dir);
      std::printf("sweep written to %s; best cell e0=%g te=%g (aulc %.4f ± %.4f)\n",
                  out_dir.c_str(), table.cells[table.best_index].e0,
                  table.cells[table.best_index].te, table.cells[table.best_index].aulc_mean,
                  table.cells[table.best_index].aulc_sd);
      return 0;
    }

    if (cmd_verify->parsed()) {
      susacer::VerifySummary sum = susacer::run_verify(report_path);
      std::printf("%s\n", sum.all_pass ? "ALL CHECKS PASS" : "CHECK FAILURES");
      return sum.all_pass ? 0 : 1;
    }

    if (cmd_plot->parsed()) {
      std::vector<susacer::CsvData> runs;
      for (const std::string& arg : plot_inputs) {
        std::size_t pos = 0;
        while (pos < arg.size()) {
          std::size_t next = arg.find(',', pos);
          if (next == std::string::npos) next = arg.size();
          runs.push_back(susacer::parse_csv(arg.substr(pos, next - pos)));
          pos = next + 1;
        }
      }
      susacer::emit_svg(runs, plot_out, title);
      std::printf("wrote %s (%zu runs)\n", plot_out.c_str(), runs.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
