#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ucbmq/agent.hpp"
#include "ucbmq/environments.hpp"
#include "ucbmq/ucbmq_agent.hpp"

namespace ucbmq {

enum class EnvKind { kGridWorld, kChain, kRandom };

struct EnvConfig {
  EnvKind kind = EnvKind::kGridWorld;
  GridWorldSpec grid{};
  int chain_length = 2;
  int random_states = 4;
  int random_actions = 2;
  std::uint64_t random_seed = 0;
};

struct ExperimentConfig {
  EnvConfig env{};
  std::string agent = "ucbmq";
  BonusMode bonus = BonusMode::kSimplified;
  std::int64_t episodes = 0;
  int runs = 8;
  std::uint64_t base_seed = 0;
  double delta = 0.1;
  std::string out;
};

/// Raised for invalid configuration text or values. `line()` is 0 when the
/// problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` lines with `#` comments. Defaults: runs = 8,
/// delta = 0.1, bonus = simplified, seed = 0, grid 10x5 with noise 0.15,
/// start (1, 1) and reward at the far corner.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on inconsistent values.
void validate_config(const ExperimentConfig& config);

std::string_view env_name(EnvKind kind);
TabularMDP build_environment(const EnvConfig& env, int horizon);
int config_horizon(const ExperimentConfig& config);

/// Agent by harness name: ucbmq, optql, ucbvi, ucbvi_greedy, random.
std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, const TabularMDP& mdp,
                                  std::uint64_t run_seed);

struct RegretRecord {
  int run;
  std::int64_t episode;
  double regret;
  double cum_regret;
};

/// Called after each episode's update with the run index, the 1-based
/// episode and the agent.
using EpisodeObserver = std::function<void(int run, std::int64_t episode, const Agent& agent)>;

/// One run: seed = base_seed + run, exact regret of the pre-episode greedy
/// policy, then one sampled episode and the agent update.
std::vector<RegretRecord> run_single(const ExperimentConfig& config, int run,
                                     const EpisodeObserver& observer = {});

/// All runs, ordered by (run, episode). `threads` = 0 picks the hardware
/// concurrency; results do not depend on it.
std::vector<RegretRecord> run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// CSV with header `agent,env,run,episode,regret,cum_regret`, 17
/// significant digits. Throws IoError naming the path on failure.
void write_records(const std::vector<RegretRecord>& records, std::string_view agent,
                   std::string_view env, const std::filesystem::path& path);
std::string format_records(const std::vector<RegretRecord>& records, std::string_view agent,
                           std::string_view env);

/// Reads back a file written by write_records.
std::vector<RegretRecord> read_records(const std::filesystem::path& path);

}  // namespace ucbmq
