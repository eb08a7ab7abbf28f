#include "susacer/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ctime>
#include <thread>

#include <json.hpp>

#include "susacer/checkpoint.hpp"
#include "susacer/envs.hpp"

namespace susacer {

namespace {

double wall_now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double thread_cpu_now() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return double(ts.tv_sec) + double(ts.tv_nsec) * 1e-9;
}

bool params_finite(const dvec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void dump_diagnostic(const RunConfig& cfg, const Agent& agent, std::uint64_t step,
                     const std::string& reason) {
  nlohmann::json j;
  j["reason"] = reason;
  j["step"] = step;
  j["seed"] = cfg.seed;
  j["max_abs_rho"] = agent.max_abs_rho();
  double amax = 0.0, cmax = 0.0;
  for (double v : agent.policy().mean_net().params()) amax = std::max(amax, std::abs(v));
  for (double v : agent.value_fn().net().params()) cmax = std::max(cmax, std::abs(v));
  j["actor_param_max_abs"] = amax;
  j["critic_param_max_abs"] = cmax;
  const std::string path =
      (cfg.out_dir.empty() ? std::string(".") : cfg.out_dir) + "/diagnostic.json";
  std::ofstream out(path);
  if (out) out << j.dump(2) << "\n";
}

}  // namespace

dvec evaluate_policy(const GaussianPolicy& pi, const RunConfig& cfg, int episodes, Rng& rng) {
  Environment env = Environment::make(cfg.env_name, cfg.env_h, cfg.env_sub_steps,
                                      cfg.env_time_limit);
  MlpWorkspace ws = pi.make_workspace(1);
  dvec returns;
  returns.reserve(episodes);
  dvec action(pi.action_dim());
  for (int ep = 0; ep < episodes; ep++) {
    dvec obs = env.reset(rng);
    double ret = 0.0;
    while (true) {
      const double* mu = pi.mean(obs.data(), ws);
      std::copy(mu, mu + pi.action_dim(), action.begin());
      StepResult res = env.step(action);
      ret += res.reward;
      if (res.terminal || res.truncated) break;
      obs = res.next;
    }
    returns.push_back(ret);
  }
  return returns;
}

double aulc(const RunRecord& rec) {
  SUSACER_CHECK(!rec.points.empty(), "aulc of an empty record");
  double sum = 0.0;
  for (const EvalPoint& p : rec.points) sum += p.mean_return;
  return sum / double(rec.points.size());
}

RunRecord train(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.validate();

  const double t_start = wall_now();
  const double c_start = thread_cpu_now();
  Environment env = Environment::make(cfg.env_name, cfg.env_h, cfg.env_sub_steps,
                                      cfg.env_time_limit);
  Agent agent(cfg.agent, env.spec().obs_dim, env.spec().action_dim, cfg.seed);
  Rng rng(derive_seed(cfg.seed, 1));

  RunRecord rec;
  rec.seed = cfg.seed;
  rec.config_snapshot = cfg.snapshot();

  auto run_eval = [&](std::uint64_t step) {
    if (!params_finite(agent.policy().mean_net().params()) ||
        !params_finite(agent.value_fn().net().params())) {
      dump_diagnostic(cfg, agent, step, "non-finite parameters");
      throw std::runtime_error("training aborted: non-finite parameters at step " +
                               std::to_string(step));
    }
    const std::uint64_t h_before = agent.train_state_hash();
    // keyed by step so records are comparable across eval frequencies
    Rng eval_rng(derive_seed(cfg.seed, 0xE0000000ULL + step));
    dvec returns = evaluate_policy(agent.policy(), cfg, cfg.eval_episodes, eval_rng);
    const std::uint64_t h_after = agent.train_state_hash();
    SUSACER_CHECK(h_before == h_after, "evaluation touched training state");
    EvalPoint p;
    p.step = step;
    p.episode_returns = returns;
    double sum = 0.0;
    for (double r : returns) sum += r;
    p.mean_return = sum / double(returns.size());
    rec.points.push_back(std::move(p));
  };

  run_eval(0);
  dvec obs = env.reset(rng);
  try {
    for (std::uint64_t t = 0; t < cfg.total_steps; t++) {
      const dvec& action = agent.act_env(obs, rng);
      StepResult res = env.step(action);
      agent.record(obs, res.next, res.reward, res.terminal, res.truncated);
      if (res.terminal || res.truncated)
        obs = env.reset(rng);
      else
        obs = res.next;
      agent.train_step(rng);
      if ((t + 1) % cfg.eval_interval == 0) run_eval(t + 1);
    }
  } catch (const std::logic_error& e) {
    dump_diagnostic(cfg, agent, agent.t_global(), e.what());
    throw;
  }

  rec.aulc = aulc(rec);
  rec.final_score = rec.points.back().mean_return;
  rec.wall_seconds = wall_now() - t_start;
  rec.cpu_seconds = thread_cpu_now() - c_start;
  rec.max_abs_rho = agent.max_abs_rho();

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    emit_csv(rec, cfg.out_dir + "/run.csv");
    Checkpoint actor;
    actor.layer_sizes = agent.policy().mean_net().layer_sizes();
    actor.sigma = agent.policy().sigma();
    actor.step = agent.actor_adam().step;
    actor.params = agent.policy().mean_net().params();
    save_checkpoint(cfg.out_dir + "/actor.ckpt", actor);
    Checkpoint critic;
    critic.layer_sizes = agent.value_fn().net().layer_sizes();
    critic.step = agent.critic_adam().step;
    critic.params = agent.value_fn().net().params();
    save_checkpoint(cfg.out_dir + "/critic.ckpt", critic);
    std::ofstream cfg_out(cfg.out_dir + "/config.txt");
    for (const auto& [k, v] : rec.config_snapshot) cfg_out << k << " = " << v << "\n";
  }
  return rec;
}

SweepTable sweep(const RunConfig& base, const std::vector<double>& e0s,
                 const std::vector<double>& tes, const std::vector<std::uint64_t>& seeds,
                 int jobs, bool progress) {
  SUSACER_CHECK(!e0s.empty() && !tes.empty() && !seeds.empty(), "empty sweep grid");
  SweepTable table;
  for (double e0 : e0s)
    for (double te : tes) {
      SweepCell cell;
      cell.e0 = e0;
      cell.te = te;
      cell.runs.resize(seeds.size());
      table.cells.push_back(std::move(cell));
    }

  struct Job {
    std::size_t cell;
    std::size_t seed_idx;
  };
  std::vector<Job> jobs_list;
  for (std::size_t c = 0; c < table.cells.size(); c++)
    for (std::size_t s = 0; s < seeds.size(); s++) jobs_list.push_back({c, s});

  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs_list.size()) return;
      const Job job = jobs_list[k];
      SweepCell& cell = table.cells[job.cell];
      RunConfig cfg = base;
      cfg.agent.schedule.e0 = cell.e0;
      cfg.agent.schedule.te = cell.te;
      cfg.seed = seeds[job.seed_idx];
      cfg.out_dir.clear();
      cell.runs[job.seed_idx] = train(cfg);
      if (progress) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::fprintf(stderr, "[sweep] e0=%g te=%g seed=%llu done (%.1fs)\n", cell.e0, cell.te,
                     (unsigned long long)cfg.seed, cell.runs[job.seed_idx].wall_seconds);
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, int(jobs_list.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; i++) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  auto stats = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / double(xs.size() - 1)) : 0.0;
    return std::pair<double, double>(mean, sd);
  };

  for (SweepCell& cell : table.cells) {
    std::vector<double> finals, aulcs;
    for (const RunRecord& r : cell.runs) {
      finals.push_back(r.final_score);
      aulcs.push_back(r.aulc);
      cell.max_wall_seconds = std::max(cell.max_wall_seconds, r.wall_seconds);
      cell.max_cpu_seconds = std::max(cell.max_cpu_seconds, r.cpu_seconds);
    }
    std::tie(cell.final_mean, cell.final_sd) = stats(finals);
    std::tie(cell.aulc_mean, cell.aulc_sd) = stats(aulcs);
  }
  for (std::size_t i = 0; i < table.cells.size(); i++)
    if (table.cells[i].aulc_mean > table.cells[table.best_index].aulc_mean) table.best_index = i;
  return table;
}

}  // namespace susacer
