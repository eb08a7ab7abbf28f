#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susacer/acer.hpp"
#include "susacer/common.hpp"

namespace susacer {

// Flat key = value configuration text: one pair per line, '#' starts a
// comment, blank lines ignored. No sections or nesting.
class KvConfig {
 public:
  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Everything one training run needs. Defaults are the desk-scale protocol;
// the long-run values remain reachable through the configuration file.
struct RunConfig {
  std::string env_name = "point_mass";
  double env_h = 0.01;
  int env_sub_steps = 1;
  int env_time_limit = 0;  // 0 = task default

  AgentConfig agent;

  std::string algorithm = "susacer";  // susacer | acer
  std::uint64_t total_steps = 200000;
  std::uint64_t eval_interval = 5000;
  int eval_episodes = 5;
  std::uint64_t seed = 0;
  std::string out_dir;

  static RunConfig from_kv(const KvConfig& kv);
  std::map<std::string, std::string> snapshot() const;

  // Applies derived values and checks the invariants: the acer baseline
  // forces e0 = 1, and eval_interval must divide total_steps.
  void validate();
};

}  // namespace susacer
