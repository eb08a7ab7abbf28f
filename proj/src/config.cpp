#include "susacer/config.hpp"

#include <fstream>
#include <sstream>

namespace susacer {

namespace {
std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}
}  // namespace

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

KvConfig KvConfig::from_string(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": not a number: " + it->second);
  }
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    const double d = std::stod(it->second);  // accepts 2e5 style
    if (d < 0) throw std::runtime_error("negative");
    return std::uint64_t(d + 0.5);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": not a count: " + it->second);
  }
}

int KvConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
  }
}

std::vector<int> KvConfig::get_int_list(const std::string& key,
                                        const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::runtime_error("config key " + key + ": empty list");
  return out;
}

RunConfig RunConfig::from_kv(const KvConfig& kv) {
  RunConfig c;
  c.env_name = kv.get_string("env.name", c.env_name);
  c.env_h = kv.get_double("env.h", c.env_h);
  c.env_sub_steps = kv.get_int("env.sub_steps", c.env_sub_steps);
  c.env_time_limit = kv.get_int("env.time_limit", c.env_time_limit);

  c.agent.gamma = kv.get_double("agent.gamma", c.agent.gamma);
  c.agent.n = std::uint32_t(kv.get_u64("agent.n", c.agent.n));
  c.agent.b = kv.get_double("agent.b", c.agent.b);
  c.agent.sigma_base = kv.get_double("agent.sigma_base", c.agent.sigma_base);
  c.agent.actor_lr = kv.get_double("agent.actor_lr", c.agent.actor_lr);
  c.agent.critic_lr = kv.get_double("agent.critic_lr", c.agent.critic_lr);
  c.agent.batch = kv.get_u64("agent.batch", c.agent.batch);
  c.agent.learning_start = kv.get_u64("agent.learning_start", c.agent.learning_start);
  c.agent.memory = kv.get_u64("agent.memory", c.agent.memory);
  c.agent.hidden = kv.get_int_list("agent.hidden", c.agent.hidden);

  c.algorithm = kv.get_string("run.algorithm", c.algorithm);
  c.total_steps = kv.get_u64("run.total_steps", c.total_steps);
  c.eval_interval = kv.get_u64("run.eval_interval", c.eval_interval);
  c.eval_episodes = kv.get_int("run.eval_episodes", c.eval_episodes);
  c.seed = kv.get_u64("run.seed", c.seed);
  c.out_dir = kv.get_string("run.out", c.out_dir);

  c.agent.schedule.e0 = kv.get_double("schedule.e0", 2.0);
  c.agent.schedule.te =
      kv.get_double("schedule.te", c.total_steps > 0 ? double(c.total_steps) / 10.0 : 1.0);

  c.validate();
  return c;
}

void RunConfig::validate() {
  if (algorithm != "susacer" && algorithm != "acer")
    throw std::runtime_error("run.algorithm must be susacer or acer");
  if (algorithm == "acer") agent.schedule.e0 = 1.0;
  agent.validate();
  if (eval_interval == 0) throw std::runtime_error("run.eval_interval must be > 0");
  if (total_steps % eval_interval != 0)
    throw std::runtime_error("run.eval_interval must divide run.total_steps");
  if (eval_episodes < 1) throw std::runtime_error("run.eval_episodes must be >= 1");
}

std::map<std::string, std::string> RunConfig::snapshot() const {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::map<std::string, std::string> m;
  m["env.name"] = env_name;
  m["env.h"] = fmt(env_h);
  m["env.sub_steps"] = std::to_string(env_sub_steps);
  m["env.time_limit"] = std::to_string(env_time_limit);
  m["agent.gamma"] = fmt(agent.gamma);
  m["agent.n"] = std::to_string(agent.n);
  m["agent.b"] = fmt(agent.b);
  m["agent.sigma_base"] = fmt(agent.sigma_base);
  m["agent.actor_lr"] = fmt(agent.actor_lr);
  m["agent.critic_lr"] = fmt(agent.critic_lr);
  m["agent.batch"] = std::to_string(agent.batch);
  m["agent.learning_start"] = std::to_string(agent.learning_start);
  m["agent.memory"] = std::to_string(agent.memory);
  {
    std::string h;
    for (std::size_t i = 0; i < agent.hidden.size(); i++)
      h += (i ? "," : "") + std::to_string(agent.hidden[i]);
    m["agent.hidden"] = h;
  }
  m["schedule.e0"] = fmt(agent.schedule.e0);
  m["schedule.te"] = fmt(agent.schedule.te);
  m["run.algorithm"] = algorithm;
  m["run.total_steps"] = std::to_string(total_steps);
  m["run.eval_interval"] = std::to_string(eval_interval);
  m["run.eval_episodes"] = std::to_string(eval_episodes);
  m["run.seed"] = std::to_string(seed);
  return m;
}

}  // namespace susacer
