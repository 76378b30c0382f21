#pragma once

// Comparison agents sharing the simplified exploration bonus: optimistic
// Q-learning with the H/n-order learning rate, UCBVI with full backward
// induction on the empirical model, and UCBVI-greedy with one-step
// real-time backups. Also a uniformly random control.

#include <cstdint>
#include <span>
#include <vector>

#include "ucbmq/agent.hpp"
#include "ucbmq/bonus.hpp"
#include "ucbmq/random.hpp"

namespace ucbmq {

struct BaselineOptions {
  /// Multiplies every bonus, including the unvisited one. Tests set it to 0.
  double bonus_scale = 1.0;
};

struct OptQLState {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> qbar;
  std::vector<double> vbar;  // h = 1..H+1

  std::size_t pair(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states + s) * num_actions + a;
  }
  std::size_t value(int h, int s) const noexcept {
    return static_cast<std::size_t>(h - 1) * num_states + s;
  }
  std::span<const double> qbar_row(int h, int s) const {
    return {qbar.data() + pair(h, s, 0), static_cast<std::size_t>(num_actions)};
  }
};

class OptQLAgent final : public Agent {
 public:
  OptQLAgent(int num_states, int num_actions, int horizon, BaselineOptions options = {});

  const OptQLState& state() const noexcept { return state_; }

  void update(const Trajectory& trajectory);

  std::string_view name() const override { return "optql"; }
  DeterministicPolicy begin_episode() override;
  int act(int h, int s) override { return argmax_first(state_.qbar_row(h, s)); }
  void observe(const Trajectory& trajectory) override { update(trajectory); }

 private:
  OptQLState state_;
  BaselineOptions options_;
};

/// Empirical model plus optimistic tables. transition_counts are stored as
/// doubles so an exact model can be injected; p_hat = transition_counts / n.
struct UcbviState {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> transition_counts;
  std::vector<double> reward_estimate;
  std::vector<std::vector<int>> observed_next;  // per pair, first-seen order
  std::vector<double> qbar;
  std::vector<double> vbar;  // h = 1..H+1

  std::size_t pair(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states + s) * num_actions + a;
  }
  std::size_t value(int h, int s) const noexcept {
    return static_cast<std::size_t>(h - 1) * num_states + s;
  }
  std::span<const double> qbar_row(int h, int s) const {
    return {qbar.data() + pair(h, s, 0), static_cast<std::size_t>(num_actions)};
  }

  /// p_hat(next | h, s, a); uniform when the pair is unvisited.
  double empirical_probability(int h, int s, int a, int next) const;
};

UcbviState make_ucbvi_state(int num_states, int num_actions, int horizon);

/// Adds one episode's transitions to the empirical model.
void record_transitions(UcbviState& state, const Trajectory& trajectory);

/// Replaces the model by `mdp` (n = 1, transition_counts = p, exact rewards).
void inject_model(UcbviState& state, const TabularMDP& mdp);

/// Full optimistic backward induction on the empirical model; Vbar only decreases.
void ucbvi_plan(UcbviState& state, const BaselineOptions& options);

/// One-step backup of every action at (h, s), monotone update of Vbar[h][s],
/// and the first maximizer of the refreshed row.
int ucbvi_greedy_step(UcbviState& state, int h, int s, const BaselineOptions& options);

class UcbviAgent final : public Agent {
 public:
  UcbviAgent(int num_states, int num_actions, int horizon, BaselineOptions options = {});

  const UcbviState& state() const noexcept { return state_; }

  std::string_view name() const override { return "ucbvi"; }
  DeterministicPolicy begin_episode() override;
  int act(int h, int s) override { return argmax_first(state_.qbar_row(h, s)); }
  void observe(const Trajectory& trajectory) override;

 private:
  UcbviState state_;
  BaselineOptions options_;
};

class UcbviGreedyAgent final : public Agent {
 public:
  UcbviGreedyAgent(int num_states, int num_actions, int horizon, BaselineOptions options = {});

  const UcbviState& state() const noexcept { return state_; }
  UcbviState& mutable_state() noexcept { return state_; }

  std::string_view name() const override { return "ucbvi_greedy"; }
  DeterministicPolicy begin_episode() override;
  int act(int h, int s) override { return ucbvi_greedy_step(state_, h, s, options_); }
  void observe(const Trajectory& trajectory) override { record_transitions(state_, trajectory); }

 private:
  UcbviState state_;
  BaselineOptions options_;
};

/// Control agent: plays a fresh uniformly drawn deterministic policy each episode.
class UniformRandomAgent final : public Agent {
 public:
  UniformRandomAgent(int num_states, int num_actions, int horizon, std::uint64_t seed);

  std::string_view name() const override { return "random"; }
  DeterministicPolicy begin_episode() override;
  int act(int h, int s) override { return current_.action(h, s); }
  void observe(const Trajectory&) override {}

 private:
  int num_actions_;
  RandomStream rng_;
  DeterministicPolicy current_;
};

}  // namespace ucbmq
