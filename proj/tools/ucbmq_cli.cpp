// Command line front end: run regret experiments, solve an environment,
// or run the invariant suite.
//
// Exit codes: 0 success, 1 validation error (or failed checks), 2 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ucbmq/checks.hpp"
#include "ucbmq/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kIoError = 2;

int run_command(const std::string& config_path, const std::string& agent_override) {
  ucbmq::ExperimentConfig config = ucbmq::load_config(config_path);
  if (!agent_override.empty()) {
    config.agent = agent_override;
    ucbmq::validate_config(config);
  }
  const auto records = ucbmq::run_experiment(config);
  const std::string_view env = ucbmq::env_name(config.env.kind);
  if (config.out.empty()) {
    std::cout << ucbmq::format_records(records, config.agent, env);
  } else {
    ucbmq::write_records(records, config.agent, env, config.out);
  }

  double mean_final = 0.0;
  for (const auto& r : records) {
    if (r.episode == config.episodes) mean_final += r.cum_regret;
  }
  mean_final /= config.runs;
  std::fprintf(stderr, "%s on %.*s: %d runs x %lld episodes, mean final cumulative regret %.6g\n",
               config.agent.c_str(), static_cast<int>(env.size()), env.data(), config.runs,
               static_cast<long long>(config.episodes), mean_final);
  return kOk;
}

int solve_command(const std::string& config_path) {
  const ucbmq::ExperimentConfig config = ucbmq::load_config(config_path);
  const ucbmq::TabularMDP mdp =
      ucbmq::build_environment(config.env, ucbmq::config_horizon(config));
  const double v = ucbmq::backward_induction(mdp).v(1, mdp.initial_state());
  std::printf("%.17g\n", v);
  return kOk;
}

int check_command() {
  bool all = true;
  for (const ucbmq::CheckResult& r : ucbmq::run_check_suite()) {
    std::printf("%-30s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kOk : kValidationError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular episodic RL laboratory: UCBMQ and baselines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string agent_override;
  auto* run = app.add_subcommand("run", "Run a regret experiment and write the CSV");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--agent", agent_override, "Override the configured agent");

  std::string solve_path;
  auto* solve = app.add_subcommand("solve", "Print the optimal value V*_1(s_1)");
  solve->add_option("--config", solve_path, "Experiment config file")->required();

  auto* check = app.add_subcommand("check", "Run the invariant and lemma suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (run->parsed()) return run_command(config_path, agent_override);
    if (solve->parsed()) return solve_command(solve_path);
    if (check->parsed()) return check_command();
  } catch (const ucbmq::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ucbmq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}
