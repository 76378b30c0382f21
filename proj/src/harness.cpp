#include "ucbmq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "ucbmq/baselines.hpp"

namespace ucbmq {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view value, int line) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("malformed integer for '" + std::string(key) + "': '" + std::string(value) +
                          "'",
                      line);
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("malformed number for '" + std::string(key) + "': '" + std::string(value) +
                          "'",
                      line);
  }
  return out;
}

constexpr std::string_view kKnownKeys[] = {
    "env",     "rows",   "cols",     "eps",   "horizon", "start_row", "start_col",
    "reward_row", "reward_col", "agent", "bonus", "episodes", "runs", "seed",
    "delta",   "out",    "length",   "states", "actions", "env_seed"};

constexpr std::string_view kAgents[] = {"ucbmq", "optql", "ucbvi", "ucbvi_greedy", "random"};

}  // namespace

std::string_view env_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kGridWorld: return "gridworld";
    case EnvKind::kChain: return "chain";
    case EnvKind::kRandom: return "random";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry, std::less<>> entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) == std::end(kKnownKeys)) {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }
    if (value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line_no);
    if (const auto it = entries.find(key); it != entries.end()) {
      throw ConfigError("duplicate key '" + std::string(key) + "' on lines " +
                            std::to_string(it->second.line) + " and " + std::to_string(line_no),
                        line_no);
    }
    entries.emplace(std::string(key), Entry{std::string(value), line_no});
  }

  for (std::string_view required : {"env", "horizon", "episodes"}) {
    if (!entries.contains(required)) {
      throw ConfigError("missing required key '" + std::string(required) + "'");
    }
  }

  ExperimentConfig cfg;
  auto get = [&](std::string_view key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto get_int = [&](std::string_view key, auto fallback) {
    using Int = decltype(fallback);
    const Entry* e = get(key);
    return e ? parse_integer<Int>(key, e->value, e->line) : fallback;
  };

  {
    const Entry& e = *get("env");
    if (e.value == "gridworld") cfg.env.kind = EnvKind::kGridWorld;
    else if (e.value == "chain") cfg.env.kind = EnvKind::kChain;
    else if (e.value == "random") cfg.env.kind = EnvKind::kRandom;
    else throw ConfigError("env must be gridworld, chain or random, got '" + e.value + "'", e.line);
  }

  const int horizon = get_int("horizon", 0);
  if (horizon < 1) throw ConfigError("horizon must be a positive integer", get("horizon")->line);
  cfg.env.grid.horizon = horizon;

  cfg.env.grid.rows = get_int("rows", cfg.env.grid.rows);
  cfg.env.grid.cols = get_int("cols", cfg.env.grid.cols);
  if (const Entry* e = get("eps")) {
    cfg.env.grid.noise = parse_real("eps", e->value, e->line);
    if (!(cfg.env.grid.noise >= 0.0 && cfg.env.grid.noise <= 1.0)) {
      throw ConfigError("eps must lie in [0, 1]", e->line);
    }
  }
  cfg.env.grid.start = {get_int("start_row", 1), get_int("start_col", 1)};
  cfg.env.grid.reward_cell = {get_int("reward_row", cfg.env.grid.rows),
                              get_int("reward_col", cfg.env.grid.cols)};
  cfg.env.chain_length = get_int("length", cfg.env.chain_length);
  cfg.env.random_states = get_int("states", cfg.env.random_states);
  cfg.env.random_actions = get_int("actions", cfg.env.random_actions);
  cfg.env.random_seed = get_int("env_seed", cfg.env.random_seed);

  if (const Entry* e = get("agent")) {
    if (std::find(std::begin(kAgents), std::end(kAgents), e->value) == std::end(kAgents)) {
      throw ConfigError("unknown agent '" + e->value +
                            "' (expected ucbmq, optql, ucbvi, ucbvi_greedy or random)",
                        e->line);
    }
    cfg.agent = e->value;
  }
  if (const Entry* e = get("bonus")) {
    if (e->value == "simplified") cfg.bonus = BonusMode::kSimplified;
    else if (e->value == "theoretical") cfg.bonus = BonusMode::kTheoretical;
    else throw ConfigError("bonus must be simplified or theoretical", e->line);
  }

  cfg.episodes = get_int("episodes", std::int64_t{0});
  if (cfg.episodes < 1) throw ConfigError("episodes must be a positive integer", get("episodes")->line);
  cfg.runs = get_int("runs", cfg.runs);
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1", get("runs")->line);
  cfg.base_seed = get_int("seed", cfg.base_seed);
  if (const Entry* e = get("delta")) {
    cfg.delta = parse_real("delta", e->value, e->line);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
      throw ConfigError("delta must lie in the open interval (0, 1), got " + e->value, e->line);
    }
  }
  if (const Entry* e = get("out")) cfg.out = e->value;

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate_config(const ExperimentConfig& cfg) {
  const GridWorldSpec& g = cfg.env.grid;
  if (g.horizon < 1) throw ConfigError("horizon must be a positive integer");
  if (cfg.episodes < 1) throw ConfigError("episodes must be a positive integer");
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (cfg.agent == "ucbmq" && cfg.episodes < 3) {
    throw ConfigError("the ucbmq agent needs episodes >= 3");
  }
  if (std::find(std::begin(kAgents), std::end(kAgents), cfg.agent) == std::end(kAgents)) {
    throw ConfigError("unknown agent '" + cfg.agent + "'");
  }
  switch (cfg.env.kind) {
    case EnvKind::kGridWorld: {
      if (g.rows < 1 || g.cols < 1) throw ConfigError("rows and cols must be positive");
      if (!(g.noise >= 0.0 && g.noise <= 1.0)) throw ConfigError("eps must lie in [0, 1]");
      auto inside = [&](GridCell c) {
        return c.row >= 1 && c.row <= g.rows && c.col >= 1 && c.col <= g.cols;
      };
      if (!inside(g.start)) throw ConfigError("start cell lies outside the grid");
      if (!inside(g.reward_cell)) throw ConfigError("reward cell lies outside the grid");
      break;
    }
    case EnvKind::kChain:
      if (cfg.env.chain_length < 2) throw ConfigError("chain length must be at least 2");
      break;
    case EnvKind::kRandom:
      if (cfg.env.random_states < 1 || cfg.env.random_actions < 1) {
        throw ConfigError("random MDP needs states >= 1 and actions >= 1");
      }
      break;
  }
}

int config_horizon(const ExperimentConfig& config) { return config.env.grid.horizon; }

TabularMDP build_environment(const EnvConfig& env, int horizon) {
  switch (env.kind) {
    case EnvKind::kGridWorld: {
      GridWorldSpec spec = env.grid;
      spec.horizon = horizon;
      return build_gridworld(spec);
    }
    case EnvKind::kChain: return build_chain(env.chain_length, horizon);
    case EnvKind::kRandom:
      return build_random_mdp(env.random_states, env.random_actions, horizon, env.random_seed);
  }
  throw ConfigError("unknown environment kind");
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, const TabularMDP& mdp,
                                  std::uint64_t run_seed) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (config.agent == "ucbmq") {
    return std::make_unique<UcbmqAgent>(S, A, H, config.episodes, config.delta, config.bonus);
  }
  if (config.agent == "optql") return std::make_unique<OptQLAgent>(S, A, H);
  if (config.agent == "ucbvi") return std::make_unique<UcbviAgent>(S, A, H);
  if (config.agent == "ucbvi_greedy") return std::make_unique<UcbviGreedyAgent>(S, A, H);
  if (config.agent == "random") {
    return std::make_unique<UniformRandomAgent>(S, A, H, derive_seed(run_seed, 1));
  }
  throw ConfigError("unknown agent '" + config.agent + "'");
}

std::vector<RegretRecord> run_single(const ExperimentConfig& config, int run,
                                     const EpisodeObserver& observer) {
  validate_config(config);
  const TabularMDP mdp = build_environment(config.env, config_horizon(config));
  const std::uint64_t run_seed = config.base_seed + static_cast<std::uint64_t>(run);
  std::unique_ptr<Agent> agent = make_agent(config, mdp, run_seed);
  RandomStream env_rng(derive_seed(run_seed, 0));

  const int s1 = mdp.initial_state();
  const double optimal_value = backward_induction(mdp).v(1, s1);

  std::vector<RegretRecord> records;
  records.reserve(static_cast<std::size_t>(config.episodes));
  double cumulative = 0.0;
  const ActionSelector select = [&agent](int h, int s) { return agent->act(h, s); };
  for (std::int64_t t = 1; t <= config.episodes; ++t) {
    const DeterministicPolicy policy = agent->begin_episode();
    const double regret = optimal_value - evaluate_policy(mdp, policy).v(1, s1);
    cumulative += regret;
    records.push_back({run, t, regret, cumulative});

    const Trajectory trajectory = sample_episode(mdp, select, env_rng);
    agent->observe(trajectory);
    if (observer) observer(run, t, *agent);
  }
  return records;
}

std::vector<RegretRecord> run_experiment(const ExperimentConfig& config, unsigned threads) {
  validate_config(config);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.runs));

  std::vector<std::vector<RegretRecord>> per_run(config.runs);
  std::vector<std::exception_ptr> errors(config.runs);
  std::atomic<int> next_run{0};
  auto worker = [&] {
    for (int r = next_run++; r < config.runs; r = next_run++) {
      try {
        per_run[r] = run_single(config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<RegretRecord> merged;
  merged.reserve(static_cast<std::size_t>(config.runs) * config.episodes);
  for (auto& run : per_run) merged.insert(merged.end(), run.begin(), run.end());
  return merged;
}

std::string format_records(const std::vector<RegretRecord>& records, std::string_view agent,
                           std::string_view env) {
  std::vector<RegretRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const RegretRecord& a, const RegretRecord& b) {
    return a.run != b.run ? a.run < b.run : a.episode < b.episode;
  });
  std::string out = "agent,env,run,episode,regret,cum_regret\n";
  char buf[64];
  for (const RegretRecord& r : sorted) {
    out.append(agent).append(",").append(env).append(",");
    out.append(std::to_string(r.run)).append(",").append(std::to_string(r.episode)).append(",");
    std::snprintf(buf, sizeof buf, "%.17g", r.regret);
    out.append(buf).append(",");
    std::snprintf(buf, sizeof buf, "%.17g", r.cum_regret);
    out.append(buf).append("\n");
  }
  return out;
}

void write_records(const std::vector<RegretRecord>& records, std::string_view agent,
                   std::string_view env, const std::filesystem::path& path) {
  const std::string text = format_records(records, agent, env);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<RegretRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "agent,env,run,episode,regret,cum_regret") {
    throw IoError("'" + path.string() + "' is not a regret CSV");
  }
  std::vector<RegretRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
    if (fields.size() != 6) throw IoError("malformed row in '" + path.string() + "': " + line);
    out.push_back({std::stoi(fields[2]), std::stoll(fields[3]), std::strtod(fields[4].c_str(), nullptr),
                   std::strtod(fields[5].c_str(), nullptr)});
  }
  return out;
}

}  // namespace ucbmq
