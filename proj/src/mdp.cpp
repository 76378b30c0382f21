#include "ucbmq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ucbmq {

namespace {

constexpr double kRowTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

TabularMDP::TabularMDP(int num_states, int num_actions, int horizon,
                       std::vector<double> transitions, std::vector<double> rewards,
                       int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_state_(initial_state),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  require(num_states > 0 && num_actions > 0 && horizon > 0,
          "TabularMDP: S, A and H must be positive");
  require(initial_state >= 0 && initial_state < num_states,
          "TabularMDP: initial state out of range");
  const std::size_t pairs = static_cast<std::size_t>(horizon) * num_states * num_actions;
  require(rewards_.size() == pairs, "TabularMDP: reward table has wrong size");
  require(transitions_.size() == pairs * num_states,
          "TabularMDP: transition table has wrong size");

  support_offsets_.reserve(pairs + 1);
  support_offsets_.push_back(0);
  for (std::size_t pair = 0; pair < pairs; ++pair) {
    const double r = rewards_[pair];
    require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "TabularMDP: reward outside [0, 1]");
    double total = 0.0;
    for (int next = 0; next < num_states; ++next) {
      const double p = transitions_[pair * num_states + next];
      require(std::isfinite(p) && p >= 0.0, "TabularMDP: negative transition probability");
      total += p;
      if (p > 0.0) support_.push_back({next, p});
    }
    require(std::abs(total - 1.0) <= kRowTolerance,
            "TabularMDP: transition row " + std::to_string(pair) + " sums to " +
                std::to_string(total));
    support_offsets_.push_back(support_.size());
  }
}

std::span<const double> TabularMDP::next_state_distribution(int h, int s, int a) const {
  return {transitions_.data() + pair_index(h, s, a) * num_states_,
          static_cast<std::size_t>(num_states_)};
}

std::span<const Successor> TabularMDP::successors(int h, int s, int a) const {
  const std::size_t pair = pair_index(h, s, a);
  return {support_.data() + support_offsets_[pair],
          support_offsets_[pair + 1] - support_offsets_[pair]};
}

void DeterministicPolicy::validate_against(const TabularMDP& mdp) const {
  require(num_states_ == mdp.num_states() && horizon_ == mdp.horizon(),
          "policy shape does not match the MDP");
  for (int a : actions_) {
    require(a >= 0 && a < mdp.num_actions(), "policy action out of range");
  }
}

ValueTable::ValueTable(int num_states, int num_actions, int horizon)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      values_(static_cast<std::size_t>(num_states) * (horizon + 1), 0.0),
      q_values_(static_cast<std::size_t>(num_states) * num_actions * horizon, 0.0) {}

double OccupancyTable::state_mass(int h, int s) const {
  double total = 0.0;
  for (int a = 0; a < num_actions_; ++a) total += at(h, s, a);
  return total;
}

double OccupancyTable::step_mass(int h) const {
  double total = 0.0;
  for (int s = 0; s < num_states_; ++s) total += state_mass(h, s);
  return total;
}

int argmax_first(std::span<const double> row) {
  int best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = static_cast<int>(a);
  }
  return best;
}

namespace {

double expected_next_value(const TabularMDP& mdp, int h, int s, int a,
                           std::span<const double> next_values) {
  double total = 0.0;
  for (const Successor& succ : mdp.successors(h, s, a)) {
    total += succ.probability * next_values[succ.state];
  }
  return total;
}

}  // namespace

ValueTable backward_induction(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTable out(S, A, H);
  for (int h = H; h >= 1; --h) {
    const auto next = out.value_row(h + 1);
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        const double q = mdp.reward(h, s, a) + expected_next_value(mdp, h, s, a, next);
        out.q(h, s, a) = q;
        best = std::max(best, q);
      }
      out.v(h, s) = best;
    }
  }
  return out;
}

ValueTable evaluate_policy(const TabularMDP& mdp, const DeterministicPolicy& policy) {
  policy.validate_against(mdp);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTable out(S, A, H);
  for (int h = H; h >= 1; --h) {
    const auto next = out.value_row(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out.q(h, s, a) = mdp.reward(h, s, a) + expected_next_value(mdp, h, s, a, next);
      }
      out.v(h, s) = out.q(h, s, policy.action(h, s));
    }
  }
  return out;
}

DeterministicPolicy greedy_policy(const ValueTable& values) {
  DeterministicPolicy policy(values.num_states(), values.horizon());
  for (int h = 1; h <= values.horizon(); ++h) {
    for (int s = 0; s < values.num_states(); ++s) {
      policy.set_action(h, s, argmax_first(values.q_row(h, s)));
    }
  }
  return policy;
}

OccupancyTable occupancy(const TabularMDP& mdp, const DeterministicPolicy& policy) {
  policy.validate_against(mdp);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  OccupancyTable d(S, A, H);
  const int s1 = mdp.initial_state();
  d.at(1, s1, policy.action(1, s1)) = 1.0;
  std::vector<double> next_mass(S);
  for (int h = 1; h < H; ++h) {
    std::fill(next_mass.begin(), next_mass.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double mass = d.at(h, s, a);
        if (mass == 0.0) continue;
        for (const Successor& succ : mdp.successors(h, s, a)) {
          next_mass[succ.state] += mass * succ.probability;
        }
      }
    }
    for (int s = 0; s < S; ++s) d.at(h + 1, s, policy.action(h + 1, s)) = next_mass[s];
  }
  return d;
}

double next_state_variance(const TabularMDP& mdp, int h, int s, int a,
                           std::span<const double> f) {
  const double mean = expected_next_value(mdp, h, s, a, f);
  double var = 0.0;
  for (const Successor& succ : mdp.successors(h, s, a)) {
    const double dev = f[succ.state] - mean;
    var += succ.probability * dev * dev;
  }
  return var;
}

VarianceTable variance_recursion(const TabularMDP& mdp, const DeterministicPolicy& policy) {
  const ValueTable values = evaluate_policy(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  VarianceTable out{ValueTable(S, A, H)};
  for (int h = H; h >= 1; --h) {
    const auto next_values = values.value_row(h + 1);
    const auto next_var = out.table.value_row(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out.table.q(h, s, a) = next_state_variance(mdp, h, s, a, next_values) +
                               expected_next_value(mdp, h, s, a, next_var);
      }
      out.table.v(h, s) = out.table.q(h, s, policy.action(h, s));
    }
  }
  return out;
}

std::vector<WeightedReturn> enumerate_trajectories(const TabularMDP& mdp,
                                                   const DeterministicPolicy& policy) {
  policy.validate_against(mdp);
  std::vector<WeightedReturn> out;
  const int H = mdp.horizon();

  // Depth-first over the support tree.
  std::function<void(int, int, double, double)> expand = [&](int h, int s, double prob,
                                                             double ret) {
    if (h == H + 1) {
      if (out.size() >= kMaxEnumeratedTrajectories) {
        throw InstanceTooLarge("enumerate_trajectories: instance too large (more than " +
                               std::to_string(kMaxEnumeratedTrajectories) + " trajectories)");
      }
      out.push_back({prob, ret});
      return;
    }
    const int a = policy.action(h, s);
    const double total = ret + mdp.reward(h, s, a);
    for (const Successor& succ : mdp.successors(h, s, a)) {
      expand(h + 1, succ.state, prob * succ.probability, total);
    }
  };
  expand(1, mdp.initial_state(), 1.0, 0.0);
  return out;
}

int sample_next_state(const TabularMDP& mdp, int h, int s, int a, RandomStream& rng) {
  const auto support = mdp.successors(h, s, a);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const Successor& succ : support) {
    cumulative += succ.probability;
    if (u < cumulative) return succ.state;
  }
  return support.back().state;
}

Trajectory sample_episode(const TabularMDP& mdp, const ActionSelector& select,
                          RandomStream& rng) {
  Trajectory traj;
  traj.steps.reserve(mdp.horizon());
  int s = mdp.initial_state();
  for (int h = 1; h <= mdp.horizon(); ++h) {
    const int a = select(h, s);
    if (a < 0 || a >= mdp.num_actions()) {
      throw std::out_of_range("sample_episode: selector returned an invalid action");
    }
    const int next = sample_next_state(mdp, h, s, a, rng);
    traj.steps.push_back({h, s, a, mdp.reward(h, s, a), next});
    s = next;
  }
  return traj;
}

}  // namespace ucbmq
