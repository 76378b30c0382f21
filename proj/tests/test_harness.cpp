#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ucbmq/harness.hpp"

using namespace ucbmq;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ucbmq_test_" + name);
}

}  // namespace

TEST(ParseConfig, MinimalGridUsesDefaults) {
  const ExperimentConfig c = parse_config("env = gridworld\nhorizon = 100\nepisodes = 10\n");
  EXPECT_EQ(c.runs, 8);
  EXPECT_EQ(c.delta, 0.1);
  EXPECT_EQ(c.bonus, BonusMode::kSimplified);
  EXPECT_EQ(c.agent, "ucbmq");
  EXPECT_EQ(c.base_seed, 0u);
  EXPECT_EQ(c.env.grid.rows, 10);
  EXPECT_EQ(c.env.grid.cols, 5);
  EXPECT_EQ(c.env.grid.noise, 0.15);
  EXPECT_EQ(c.env.grid.reward_cell.row, 10);
  EXPECT_EQ(c.env.grid.reward_cell.col, 5);
  EXPECT_EQ(config_horizon(c), 100);
}

TEST(ParseConfig, AllKeys) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "env = gridworld\nrows = 4\ncols = 3\neps = 0.2\nhorizon = 7   # trailing\n"
      "start_row = 2\nstart_col = 1\nreward_row = 4\nreward_col = 2\n"
      "agent = ucbvi_greedy\nbonus = theoretical\nepisodes = 50\nruns = 3\nseed = 11\n"
      "delta = 0.05\nout = results.csv\n");
  EXPECT_EQ(c.env.grid.rows, 4);
  EXPECT_EQ(c.env.grid.cols, 3);
  EXPECT_EQ(c.env.grid.noise, 0.2);
  EXPECT_EQ(c.env.grid.start.row, 2);
  EXPECT_EQ(c.env.grid.reward_cell.col, 2);
  EXPECT_EQ(c.agent, "ucbvi_greedy");
  EXPECT_EQ(c.bonus, BonusMode::kTheoretical);
  EXPECT_EQ(c.episodes, 50);
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.base_seed, 11u);
  EXPECT_EQ(c.delta, 0.05);
  EXPECT_EQ(c.out, "results.csv");
}

TEST(ParseConfig, DeltaOutOfRangeNamesInterval) {
  const std::string msg = error_of("env = gridworld\nhorizon = 5\nepisodes = 10\ndelta = 1.5\n");
  EXPECT_NE(msg.find("(0, 1)"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(ParseConfig, DuplicateKeyCitesBothLines) {
  const std::string msg = error_of("env = gridworld\nhorizon = 5\nepisodes = 10\nhorizon = 6\n");
  EXPECT_NE(msg.find("2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("lines 2 and 4"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownMalformedAndMissing) {
  EXPECT_NE(error_of("env = gridworld\nhorizon = 5\nepisodes = 10\ncolour = red\n").find("line 4"),
            std::string::npos);
  EXPECT_NE(error_of("env = gridworld\nhorizon = five\nepisodes = 10\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of("env = gridworld\nhorizon = 5\nepisodes = 10\neps = 0.1x\n").find("line 4"),
            std::string::npos);
  EXPECT_NE(error_of("env = gridworld\nepisodes = 10\n").find("horizon"), std::string::npos);
  EXPECT_NE(error_of("env gridworld\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("env = gridworld\nhorizon = 5\nepisodes = 0\n").find("episodes"),
            std::string::npos);
  EXPECT_NE(error_of("env = gridworld\nhorizon = 5\nepisodes = 5\nagent = sarsa\n").find("line 4"),
            std::string::npos);
  EXPECT_FALSE(error_of("env = gridworld\nhorizon = 5\nepisodes = 5\nreward_row = 11\n").empty());
}

TEST(ParseConfig, UcbmqNeedsThreeEpisodes) {
  EXPECT_THROW(parse_config("env = chain\nhorizon = 3\nepisodes = 2\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("env = chain\nhorizon = 3\nepisodes = 2\nagent = optql\n"));
}

TEST(LoadConfig, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/dir/config.cfg"), IoError);
}

TEST(RunExperiment, DegenerateMdpHasZeroRegret) {
  for (const char* agent : {"ucbmq", "optql", "ucbvi", "ucbvi_greedy", "random"}) {
    ExperimentConfig c = parse_config(
        "env = random\nstates = 1\nactions = 1\nhorizon = 4\nepisodes = 20\nruns = 2\n");
    c.agent = agent;
    for (const RegretRecord& r : run_experiment(c, 1)) {
      EXPECT_EQ(r.regret, 0.0) << agent;
      EXPECT_EQ(r.cum_regret, 0.0) << agent;
    }
  }
}

TEST(RunExperiment, RegretNonNegativeAndCumulative) {
  for (const char* agent : {"ucbmq", "optql", "ucbvi", "ucbvi_greedy", "random"}) {
    ExperimentConfig c = parse_config(
        "env = random\nstates = 4\nactions = 2\nenv_seed = 3\nhorizon = 4\nepisodes = 60\nruns = 3\n");
    c.agent = agent;
    const auto records = run_experiment(c, 2);
    ASSERT_EQ(records.size(), 180u);
    double running = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const RegretRecord& r = records[i];
      EXPECT_EQ(r.run, static_cast<int>(i / 60));
      EXPECT_EQ(r.episode, static_cast<std::int64_t>(i % 60) + 1);
      if (r.episode == 1) running = 0.0;
      running += r.regret;
      EXPECT_GE(r.regret, 0.0) << agent;
      EXPECT_EQ(r.cum_regret, running);
    }
  }
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  const ExperimentConfig c = parse_config(
      "env = gridworld\nrows = 3\ncols = 3\nhorizon = 6\nepisodes = 40\nruns = 4\nseed = 5\n");
  const auto one = format_records(run_experiment(c, 1), c.agent, "gridworld");
  const auto many = format_records(run_experiment(c, 4), c.agent, "gridworld");
  EXPECT_EQ(one, many);
}

TEST(RunExperiment, RunsUseDistinctStreams) {
  const ExperimentConfig c = parse_config(
      "env = gridworld\nrows = 3\ncols = 3\nhorizon = 6\nepisodes = 40\nruns = 2\nagent = random\n");
  const auto a = run_single(c, 0);
  const auto b = run_single(c, 1);
  bool differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) differ = differ || a[i].regret != b[i].regret;
  EXPECT_TRUE(differ);
}

TEST(Csv, EmptyRecordsGiveHeaderOnly) {
  EXPECT_EQ(format_records({}, "ucbmq", "gridworld"), "agent,env,run,episode,regret,cum_regret\n");
  const auto path = temp_path("empty.csv");
  write_records({}, "ucbmq", "gridworld", path);
  EXPECT_TRUE(read_records(path).empty());
  std::filesystem::remove(path);
}

TEST(Csv, OrderedRowsAndExactRoundTrip) {
  std::vector<RegretRecord> records;
  const double values[] = {0.1, 1.0 / 3.0, 2.718281828459045};
  for (int run : {1, 0}) {
    double cum = 0.0;
    for (int t = 1; t <= 3; ++t) {
      cum += values[t - 1] * (run + 1);
      records.push_back({run, t, values[t - 1] * (run + 1), cum});
    }
  }
  const std::string text = format_records(records, "optql", "chain");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "agent,env,run,episode,regret,cum_regret");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].rfind("optql,chain,0,1,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("optql,chain,1,1,", 0), 0u);
  EXPECT_EQ(rows[5].rfind("optql,chain,1,3,", 0), 0u);

  const auto path = temp_path("roundtrip.csv");
  write_records(records, "optql", "chain", path);
  const auto back = read_records(path);
  ASSERT_EQ(back.size(), 6u);
  double cum = 0.0;
  for (const RegretRecord& r : back) {
    if (r.episode == 1) cum = 0.0;
    cum += r.regret;
    EXPECT_EQ(cum, r.cum_regret);
  }
  std::filesystem::remove(path);
}

TEST(Csv, ExperimentRoundTripReproducesCumulativeSums) {
  const ExperimentConfig c = parse_config(
      "env = gridworld\nrows = 3\ncols = 4\nhorizon = 8\nepisodes = 50\nruns = 2\n");
  const auto records = run_experiment(c, 1);
  const auto path = temp_path("experiment.csv");
  write_records(records, c.agent, "gridworld", path);
  const auto back = read_records(path);
  ASSERT_EQ(back.size(), records.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].regret, records[i].regret);
    if (back[i].episode == 1) cum = 0.0;
    cum += back[i].regret;
    EXPECT_EQ(cum, back[i].cum_regret);
  }
  std::filesystem::remove(path);
}

TEST(Csv, UnwritablePathNamesThePath) {
  try {
    write_records({}, "ucbmq", "gridworld", "/nonexistent/dir/out.csv");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/out.csv"), std::string::npos);
  }
}

TEST(MakeAgent, KnownNames) {
  ExperimentConfig c = parse_config("env = chain\nhorizon = 3\nepisodes = 5\n");
  const TabularMDP mdp = build_environment(c.env, 3);
  for (const char* name : {"ucbmq", "optql", "ucbvi", "ucbvi_greedy", "random"}) {
    c.agent = name;
    EXPECT_EQ(make_agent(c, mdp, 0)->name(), name);
  }
  c.agent = "nope";
  EXPECT_THROW(make_agent(c, mdp, 0), ConfigError);
}
