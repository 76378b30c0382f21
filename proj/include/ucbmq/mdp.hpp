#pragma once

// Finite-horizon tabular MDPs and exact solvers.
//
// Steps h are 1-based (h = 1..H); value tables carry an explicit row for
// h = H + 1 that is identically zero. States and actions are 0-based.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ucbmq/random.hpp"

namespace ucbmq {

struct Successor {
  int state;
  double probability;
};

/// Non-stationary episodic MDP with deterministic rewards in [0, 1].
///
/// The dense transition tensor is kept alongside a sparse successor list
/// per (h, s, a); solvers iterate the sparse list.
class TabularMDP {
 public:
  /// `transitions` is laid out [h][s][a][s'] and `rewards` [h][s][a], both
  /// h-major starting at h = 1. Throws std::invalid_argument when a row is
  /// not a distribution (tolerance 1e-12) or a reward leaves [0, 1].
  TabularMDP(int num_states, int num_actions, int horizon,
             std::vector<double> transitions, std::vector<double> rewards,
             int initial_state);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  int horizon() const noexcept { return horizon_; }
  int initial_state() const noexcept { return initial_state_; }

  std::span<const double> next_state_distribution(int h, int s, int a) const;
  std::span<const Successor> successors(int h, int s, int a) const;
  double transition(int h, int s, int a, int next) const {
    return transitions_[pair_index(h, s, a) * num_states_ + next];
  }
  double reward(int h, int s, int a) const { return rewards_[pair_index(h, s, a)]; }

  const std::vector<double>& transitions() const noexcept { return transitions_; }
  const std::vector<double>& rewards() const noexcept { return rewards_; }

  std::size_t pair_index(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states_ + s) * num_actions_ + a;
  }

 private:
  int num_states_;
  int num_actions_;
  int horizon_;
  int initial_state_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  std::vector<std::size_t> support_offsets_;
  std::vector<Successor> support_;
};

/// Deterministic non-stationary policy pi[h][s].
class DeterministicPolicy {
 public:
  DeterministicPolicy(int num_states, int horizon, int fill_action = 0)
      : num_states_(num_states), horizon_(horizon),
        actions_(static_cast<std::size_t>(num_states) * horizon, fill_action) {}

  int num_states() const noexcept { return num_states_; }
  int horizon() const noexcept { return horizon_; }

  int action(int h, int s) const { return actions_[index(h, s)]; }
  void set_action(int h, int s, int a) { actions_[index(h, s)] = a; }

  const std::vector<int>& actions() const noexcept { return actions_; }

  /// Throws std::invalid_argument when shapes disagree or an action is out of range.
  void validate_against(const TabularMDP& mdp) const;

  friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;

 private:
  std::size_t index(int h, int s) const noexcept {
    return static_cast<std::size_t>(h - 1) * num_states_ + s;
  }

  int num_states_;
  int horizon_;
  std::vector<int> actions_;
};

/// V[h][s] for h = 1..H+1 and Q[h][s][a] for h = 1..H.
class ValueTable {
 public:
  ValueTable(int num_states, int num_actions, int horizon);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  int horizon() const noexcept { return horizon_; }

  double& v(int h, int s) { return values_[static_cast<std::size_t>(h - 1) * num_states_ + s]; }
  double v(int h, int s) const { return values_[static_cast<std::size_t>(h - 1) * num_states_ + s]; }
  double& q(int h, int s, int a) { return q_values_[q_index(h, s, a)]; }
  double q(int h, int s, int a) const { return q_values_[q_index(h, s, a)]; }

  std::span<const double> value_row(int h) const {
    return {values_.data() + static_cast<std::size_t>(h - 1) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  std::span<const double> q_row(int h, int s) const {
    return {q_values_.data() + q_index(h, s, 0), static_cast<std::size_t>(num_actions_)};
  }

 private:
  std::size_t q_index(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states_ + s) * num_actions_ + a;
  }

  int num_states_;
  int num_actions_;
  int horizon_;
  std::vector<double> values_;
  std::vector<double> q_values_;
};

/// Reach probabilities d[h][s][a] of a policy from the initial state.
class OccupancyTable {
 public:
  OccupancyTable(int num_states, int num_actions, int horizon)
      : num_states_(num_states), num_actions_(num_actions), horizon_(horizon),
        d_(static_cast<std::size_t>(num_states) * num_actions * horizon, 0.0) {}

  double& at(int h, int s, int a) { return d_[index(h, s, a)]; }
  double at(int h, int s, int a) const { return d_[index(h, s, a)]; }
  double state_mass(int h, int s) const;
  double step_mass(int h) const;

  int horizon() const noexcept { return horizon_; }

 private:
  std::size_t index(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states_ + s) * num_actions_ + a;
  }

  int num_states_;
  int num_actions_;
  int horizon_;
  std::vector<double> d_;
};

/// Return variances: Qvar[h][s][a] and Vvar[h][s] (h = 1..H+1).
struct VarianceTable {
  ValueTable table;

  double q(int h, int s, int a) const { return table.q(h, s, a); }
  double v(int h, int s) const { return table.v(h, s); }
};

struct TransitionStep {
  int h;
  int state;
  int action;
  double reward;
  int next_state;

  friend bool operator==(const TransitionStep&, const TransitionStep&) = default;
};

struct Trajectory {
  std::vector<TransitionStep> steps;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct WeightedReturn {
  double probability;
  double total_return;
};

class InstanceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kMaxEnumeratedTrajectories = 1'000'000;

/// Optimal Q*/V* by backward induction.
ValueTable backward_induction(const TabularMDP& mdp);

ValueTable evaluate_policy(const TabularMDP& mdp, const DeterministicPolicy& policy);

/// Policy acting greedily on a Q table; ties go to the smallest action index.
DeterministicPolicy greedy_policy(const ValueTable& values);

OccupancyTable occupancy(const TabularMDP& mdp, const DeterministicPolicy& policy);

/// Var_{p_h}(f)(s, a) for a function f over next states.
double next_state_variance(const TabularMDP& mdp, int h, int s, int a, std::span<const double> f);

VarianceTable variance_recursion(const TabularMDP& mdp, const DeterministicPolicy& policy);

/// Every support trajectory (s_1, ..., s_{H+1}) with its probability and total return.
/// Throws InstanceTooLarge past kMaxEnumeratedTrajectories.
std::vector<WeightedReturn> enumerate_trajectories(const TabularMDP& mdp,
                                                   const DeterministicPolicy& policy);

using ActionSelector = std::function<int(int h, int s)>;

/// Draws a successor of (h, s, a) by inverse CDF on one uniform draw.
int sample_next_state(const TabularMDP& mdp, int h, int s, int a, RandomStream& rng);

Trajectory sample_episode(const TabularMDP& mdp, const ActionSelector& select, RandomStream& rng);

/// Index of the first maximizer.
int argmax_first(std::span<const double> row);

}  // namespace ucbmq
