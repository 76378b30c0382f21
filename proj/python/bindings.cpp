#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucbmq/baselines.hpp"
#include "ucbmq/checks.hpp"
#include "ucbmq/environments.hpp"
#include "ucbmq/harness.hpp"
#include "ucbmq/mdp.hpp"
#include "ucbmq/ucbmq_agent.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

// Nested lists V[h-1][s] for h = 1..H+1.
std::vector<std::vector<double>> value_rows(const ucbmq::ValueTable& table) {
  std::vector<std::vector<double>> out;
  for (int h = 1; h <= table.horizon() + 1; ++h) {
    const auto row = table.value_row(h);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> q_rows(const ucbmq::ValueTable& table) {
  std::vector<std::vector<std::vector<double>>> out(table.horizon());
  for (int h = 1; h <= table.horizon(); ++h) {
    for (int s = 0; s < table.num_states(); ++s) {
      const auto row = table.q_row(h, s);
      out[h - 1].emplace_back(row.begin(), row.end());
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = R"pbdoc(
      Tabular episodic RL laboratory
      ------------------------------
      Exact finite-horizon MDP solvers, the UCBMQ learner, its baselines
      and the regret harness.
  )pbdoc";

  py::class_<ucbmq::TabularMDP>(m, "TabularMDP")
      .def(py::init<int, int, int, std::vector<double>, std::vector<double>, int>(),
           "num_states"_a, "num_actions"_a, "horizon"_a, "transitions"_a, "rewards"_a,
           "initial_state"_a)
      .def_property_readonly("num_states", &ucbmq::TabularMDP::num_states)
      .def_property_readonly("num_actions", &ucbmq::TabularMDP::num_actions)
      .def_property_readonly("horizon", &ucbmq::TabularMDP::horizon)
      .def_property_readonly("initial_state", &ucbmq::TabularMDP::initial_state)
      .def("transition", &ucbmq::TabularMDP::transition, "h"_a, "s"_a, "a"_a, "next"_a)
      .def("reward", &ucbmq::TabularMDP::reward, "h"_a, "s"_a, "a"_a);

  py::class_<ucbmq::DeterministicPolicy>(m, "DeterministicPolicy")
      .def(py::init<int, int, int>(), "num_states"_a, "horizon"_a, "fill_action"_a = 0)
      .def("action", &ucbmq::DeterministicPolicy::action, "h"_a, "s"_a)
      .def("set_action", &ucbmq::DeterministicPolicy::set_action, "h"_a, "s"_a, "a"_a);

  py::class_<ucbmq::ValueTable>(m, "ValueTable")
      .def("v", py::overload_cast<int, int>(&ucbmq::ValueTable::v, py::const_), "h"_a, "s"_a)
      .def("q", py::overload_cast<int, int, int>(&ucbmq::ValueTable::q, py::const_), "h"_a,
           "s"_a, "a"_a)
      .def("values", &value_rows, "V as nested lists, rows h = 1..H+1")
      .def("q_values", &q_rows, "Q as nested lists [h-1][s][a]");

  py::class_<ucbmq::GridCell>(m, "GridCell")
      .def(py::init<int, int>(), "row"_a, "col"_a)
      .def_readwrite("row", &ucbmq::GridCell::row)
      .def_readwrite("col", &ucbmq::GridCell::col);

  py::class_<ucbmq::GridWorldSpec>(m, "GridWorldSpec")
      .def(py::init<>())
      .def_readwrite("rows", &ucbmq::GridWorldSpec::rows)
      .def_readwrite("cols", &ucbmq::GridWorldSpec::cols)
      .def_readwrite("noise", &ucbmq::GridWorldSpec::noise)
      .def_readwrite("horizon", &ucbmq::GridWorldSpec::horizon)
      .def_readwrite("start", &ucbmq::GridWorldSpec::start)
      .def_readwrite("reward_cell", &ucbmq::GridWorldSpec::reward_cell);

  m.def("build_gridworld", &ucbmq::build_gridworld, "spec"_a);
  m.def("build_chain", &ucbmq::build_chain, "length"_a, "horizon"_a);
  m.def("build_random_mdp", &ucbmq::build_random_mdp, "num_states"_a, "num_actions"_a,
        "horizon"_a, "seed"_a);

  m.def("backward_induction", &ucbmq::backward_induction, "mdp"_a);
  m.def("evaluate_policy", &ucbmq::evaluate_policy, "mdp"_a, "policy"_a);
  m.def("greedy_policy", &ucbmq::greedy_policy, "values"_a);
  m.def(
      "variance_of_return",
      [](const ucbmq::TabularMDP& mdp, const ucbmq::DeterministicPolicy& policy) {
        return ucbmq::variance_recursion(mdp, policy).v(1, mdp.initial_state());
      },
      "mdp"_a, "policy"_a);

  py::class_<ucbmq::RateBundle>(m, "RateBundle")
      .def_readonly("alpha", &ucbmq::RateBundle::alpha)
      .def_readonly("gamma", &ucbmq::RateBundle::gamma)
      .def_readonly("eta", &ucbmq::RateBundle::eta)
      .def_readonly("gamma_bar", &ucbmq::RateBundle::gamma_bar);
  m.def("compute_rates", &ucbmq::compute_rates, "n"_a, "horizon"_a);
  m.def("exploration_threshold", &ucbmq::exploration_threshold, "episodes"_a, "delta"_a);
  m.def("simplified_bonus", &ucbmq::simplified_bonus, "n"_a, "h"_a, "horizon"_a);

  py::enum_<ucbmq::BonusMode>(m, "BonusMode")
      .value("THEORETICAL", ucbmq::BonusMode::kTheoretical)
      .value("SIMPLIFIED", ucbmq::BonusMode::kSimplified);

  py::class_<ucbmq::RegretRecord>(m, "RegretRecord")
      .def_readonly("run", &ucbmq::RegretRecord::run)
      .def_readonly("episode", &ucbmq::RegretRecord::episode)
      .def_readonly("regret", &ucbmq::RegretRecord::regret)
      .def_readonly("cum_regret", &ucbmq::RegretRecord::cum_regret);

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& agent) {
        ucbmq::ExperimentConfig config = ucbmq::parse_config(config_text);
        if (!agent.empty()) {
          config.agent = agent;
          ucbmq::validate_config(config);
        }
        py::gil_scoped_release release;
        return ucbmq::run_experiment(config);
      },
      "config_text"_a, "agent"_a = "",
      "Run the experiment described by config text; returns records ordered by (run, episode).");
  m.def(
      "format_records",
      [](const std::vector<ucbmq::RegretRecord>& records, const std::string& agent,
         const std::string& env) { return ucbmq::format_records(records, agent, env); },
      "records"_a, "agent"_a, "env"_a);

  py::class_<ucbmq::BoundParams>(m, "BoundParams")
      .def(py::init<std::int64_t, std::int64_t, std::int64_t, std::int64_t, double>(),
           "num_states"_a, "num_actions"_a, "horizon"_a, "episodes"_a, "delta"_a);
  m.def("theoretical_bound_log10", &ucbmq::theoretical_bound_log10, "params"_a);

  m.def("run_check_suite", [] {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& r : ucbmq::run_check_suite()) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  });

  py::register_exception<ucbmq::ConfigError>(m, "ConfigError", PyExc_ValueError);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
