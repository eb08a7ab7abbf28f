#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "susacer/checkpoint.hpp"
#include "susacer/harness.hpp"

using namespace susacer;

namespace {

// Small fast configuration shared by the harness tests.
RunConfig tiny_config() {
  RunConfig cfg;
  cfg.env_name = "point_mass";
  cfg.total_steps = 600;
  cfg.eval_interval = 300;
  cfg.eval_episodes = 2;
  cfg.agent.batch = 8;
  cfg.agent.learning_start = 100;
  cfg.agent.n = 4;
  cfg.agent.schedule = SustainSchedule{2.0, 300.0, 4};
  cfg.seed = 5;
  cfg.validate();
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string s(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("config grammar: comments, blanks, overrides, errors") {
  KvConfig kv = KvConfig::from_string(
      "# a comment\n"
      "\n"
      "env.name = pendulum   # trailing comment\n"
      "agent.gamma=0.95\n"
      "run.total_steps = 2e4\n"
      "agent.hidden = 32, 32\n");
  CHECK(kv.get_string("env.name", "") == "pendulum");
  CHECK(kv.get_double("agent.gamma", 0) == 0.95);
  CHECK(kv.get_u64("run.total_steps", 0) == 20000);
  CHECK(kv.get_int_list("agent.hidden", {}) == std::vector<int>{32, 32});

  CHECK_THROWS(KvConfig::from_string("not a pair\n"));
  CHECK_THROWS(KvConfig::from_string("= no key\n"));

  kv.set("run.eval_interval", "1e4");
  RunConfig cfg = RunConfig::from_kv(kv);
  CHECK(cfg.env_name == "pendulum");
  CHECK(cfg.agent.gamma == 0.95);
  CHECK(cfg.eval_interval == 10000);
  CHECK(cfg.agent.schedule.te == doctest::Approx(2000.0));  // total/10 default
}

TEST_CASE("validation: acer forces e0 = 1 and eval must divide total") {
  KvConfig kv = KvConfig::from_string("run.algorithm = acer\nschedule.e0 = 4\n");
  RunConfig cfg = RunConfig::from_kv(kv);
  CHECK(cfg.agent.schedule.e0 == 1.0);
  CHECK(cfg.agent.schedule.cap == cfg.agent.n);

  KvConfig bad = KvConfig::from_string("run.total_steps = 1000\nrun.eval_interval = 300\n");
  CHECK_THROWS(RunConfig::from_kv(bad));
  KvConfig bad_alg = KvConfig::from_string("run.algorithm = ppo\n");
  CHECK_THROWS(RunConfig::from_kv(bad_alg));
}

TEST_CASE("aulc is the mean of evaluation means") {
  RunRecord rec;
  for (int i = 0; i < 3; i++) {
    EvalPoint p;
    p.step = std::uint64_t(i);
    p.mean_return = double(i);
    rec.points.push_back(p);
  }
  CHECK(aulc(rec) == doctest::Approx(1.0).epsilon(1e-15));

  RunRecord constant;
  for (int i = 0; i < 5; i++) {
    EvalPoint p;
    p.mean_return = 2.5;
    constant.points.push_back(p);
  }
  CHECK(aulc(constant) == doctest::Approx(2.5).epsilon(1e-15));

  RunRecord shifted = rec;
  for (auto& p : shifted.points) p.mean_return += 7.0;
  CHECK(aulc(shifted) == doctest::Approx(aulc(rec) + 7.0).epsilon(1e-12));

  RunRecord empty;
  CHECK_THROWS_AS(aulc(empty), std::logic_error);
}

TEST_CASE("zero-step run records only the initial evaluation") {
  RunConfig cfg = tiny_config();
  cfg.total_steps = 0;
  cfg.eval_interval = 1;
  RunRecord rec = train(cfg);
  CHECK(rec.points.size() == 1);
  CHECK(rec.points[0].step == 0);
  CHECK(rec.points[0].episode_returns.size() == 2);
  CHECK(rec.aulc == rec.points[0].mean_return);
}

TEST_CASE("identical config and seed give bitwise-identical csv") {
  TempDir dir("susacer_test_det");
  RunConfig cfg = tiny_config();
  RunRecord a = train(cfg);
  RunRecord b = train(cfg);
  emit_csv(a, dir.s("a.csv"));
  emit_csv(b, dir.s("b.csv"));
  CHECK(read_file(dir.s("a.csv")) == read_file(dir.s("b.csv")));
}

TEST_CASE("evaluation leaves training unaffected: eval frequency changes nothing") {
  RunConfig sparse = tiny_config();
  RunConfig dense = tiny_config();
  dense.eval_interval = 100;  // 6 eval blocks instead of 2
  RunRecord a = train(sparse);
  RunRecord b = train(dense);
  // the final evaluation happens at the same step with the same weights
  CHECK(a.points.back().step == b.points.back().step);
  CHECK(a.points.back().mean_return == b.points.back().mean_return);
  CHECK(a.points.back().episode_returns == b.points.back().episode_returns);
}

TEST_CASE("emitting an empty record is an error") {
  RunRecord empty;
  CHECK_THROWS_AS(emit_csv(empty, "/tmp/should_not_exist.csv"), std::logic_error);
  CHECK_THROWS(parse_csv("/tmp/definitely_missing_file.csv"));
}

TEST_CASE("csv round-trip preserves every number") {
  TempDir dir("susacer_test_csv");
  RunConfig cfg = tiny_config();
  RunRecord rec = train(cfg);
  emit_csv(rec, dir.s("run.csv"));
  CsvData data = parse_csv(dir.s("run.csv"));
  REQUIRE(data.steps.size() == rec.points.size());
  for (std::size_t i = 0; i < rec.points.size(); i++) {
    CHECK(data.steps[i] == rec.points[i].step);
    CHECK(data.mean_returns[i] == rec.points[i].mean_return);
    CHECK(data.episodes[i] == rec.points[i].episode_returns);
  }
  // aulc recomputable from the csv
  double s = 0.0;
  for (double m : data.mean_returns) s += m;
  CHECK(s / data.mean_returns.size() == doctest::Approx(rec.aulc).epsilon(1e-12));
}

TEST_CASE("train writes artifacts when an output directory is set") {
  TempDir dir("susacer_test_out");
  RunConfig cfg = tiny_config();
  cfg.out_dir = dir.s("run0");
  train(cfg);
  CHECK(std::filesystem::exists(dir.s("run0") + "/run.csv"));
  CHECK(std::filesystem::exists(dir.s("run0") + "/actor.ckpt"));
  CHECK(std::filesystem::exists(dir.s("run0") + "/critic.ckpt"));
  Checkpoint actor = load_checkpoint(dir.s("run0") + "/actor.ckpt");
  CHECK(actor.layer_sizes == std::vector<int>{4, 64, 64, 2});
  CHECK(actor.sigma.size() == 2);
  CHECK(actor.params.size() == 4 * 64 + 64 + 64 * 64 + 64 + 64 * 2 + 2);
}

TEST_CASE("checkpoint round-trip") {
  TempDir dir("susacer_test_ckpt");
  Checkpoint ck;
  ck.layer_sizes = {3, 8, 1};
  ck.sigma = {0.4};
  ck.step = 42;
  ck.params = {1.0, -2.5, 3.25, 0.125};
  save_checkpoint(dir.s("x.ckpt"), ck);
  Checkpoint re = load_checkpoint(dir.s("x.ckpt"));
  CHECK(re.layer_sizes == ck.layer_sizes);
  CHECK(re.sigma == ck.sigma);
  CHECK(re.step == 42);
  CHECK(re.params == ck.params);
  CHECK_THROWS(load_checkpoint(dir.s("missing.ckpt")));
}

TEST_CASE("svg plot: band over multiple runs, grid mismatch rejected") {
  TempDir dir("susacer_test_svg");
  RunConfig cfg = tiny_config();
  RunRecord a = train(cfg);
  cfg.seed = 6;
  RunRecord b = train(cfg);
  emit_csv(a, dir.s("a.csv"));
  emit_csv(b, dir.s("b.csv"));
  std::vector<CsvData> runs = {parse_csv(dir.s("a.csv")), parse_csv(dir.s("b.csv"))};
  emit_svg(runs, dir.s("curve.svg"), "test curve");
  const std::string svg = read_file(dir.s("curve.svg"));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("fill-opacity") != std::string::npos);  // the sd band
  CHECK(svg.find("polyline") != std::string::npos);      // the mean line

  CsvData truncated = runs[1];
  truncated.steps.pop_back();
  truncated.mean_returns.pop_back();
  truncated.episodes.pop_back();
  CHECK_THROWS(emit_svg({runs[0], truncated}, dir.s("bad.svg"), "bad"));
}

TEST_CASE("one-cell sweep matches a direct train call") {
  RunConfig cfg = tiny_config();
  SweepTable table = sweep(cfg, {2.0}, {300.0}, {cfg.seed}, 1);
  REQUIRE(table.cells.size() == 1);
  REQUIRE(table.cells[0].runs.size() == 1);
  RunRecord direct = train(cfg);
  CHECK(table.cells[0].runs[0].aulc == direct.aulc);
  CHECK(table.cells[0].runs[0].final_score == direct.final_score);
  CHECK(table.cells[0].aulc_sd == 0.0);
}

TEST_CASE("a 3x3 grid emits nine rows") {
  TempDir dir("susacer_test_grid");
  RunConfig cfg = tiny_config();
  cfg.total_steps = 300;
  cfg.eval_interval = 300;
  cfg.agent.batch = 4;
  SweepTable t = sweep(cfg, {1.0, 2.0, 4.0}, {100.0, 200.0, 400.0}, {3}, 2);
  CHECK(t.cells.size() == 9);
  emit_sweep(t, dir.s("grid"), false);
  const std::string report = read_file(dir.s("grid") + "/report.md");
  int rows = 0;
  for (std::size_t p = report.find("| 1 "); p != std::string::npos; p = report.find("\n| ", p + 1))
    rows++;
  CHECK(rows == 9);
}

TEST_CASE("sweep structure and parallel determinism") {
  TempDir dir("susacer_test_sweep");
  RunConfig cfg = tiny_config();
  cfg.total_steps = 300;
  cfg.eval_interval = 150;
  SweepTable serial = sweep(cfg, {1.0, 2.0, 4.0}, {100.0}, {5, 6}, 1);
  SweepTable parallel = sweep(cfg, {1.0, 2.0, 4.0}, {100.0}, {5, 6}, 2);
  REQUIRE(serial.cells.size() == 3);
  for (std::size_t i = 0; i < 3; i++) {
    CHECK(serial.cells[i].aulc_mean == parallel.cells[i].aulc_mean);
    CHECK(serial.cells[i].final_mean == parallel.cells[i].final_mean);
  }
  CHECK(serial.best_index == parallel.best_index);
  // best cell is the argmax of mean aulc
  for (const SweepCell& c : serial.cells)
    CHECK(serial.cells[serial.best_index].aulc_mean >= c.aulc_mean);

  emit_sweep(serial, dir.s("sweep"));
  CHECK(std::filesystem::exists(dir.s("sweep") + "/sweep.csv"));
  const std::string report = read_file(dir.s("sweep") + "/report.md");
  CHECK(report.find("**") != std::string::npos);  // bolded best cell
  CHECK(std::filesystem::exists(dir.s("sweep") + "/run_e01_te100_seed5.csv"));
}
