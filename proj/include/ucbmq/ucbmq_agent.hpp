#pragma once

// Optimistic Q-learning with a momentum correction (UCBMQ).
//
// Each visited (h, s, a) keeps a bias-value function V_{h,s,a} over next
// states, a running convex combination of past optimistic next-step values
// with rate eta = alpha + gamma. The Q update adds gamma times the gap
// between the fresh optimistic value and that bias-value function, which
// removes the bias of plain 1/n averaging while still averaging every target.

#include <cstdint>
#include <span>
#include <vector>

#include "ucbmq/agent.hpp"

namespace ucbmq {

enum class BonusMode { kTheoretical, kSimplified };

/// Learning rate, momentum rate, their sum, and the normalized momentum
/// gamma / alpha for one visit.
struct RateBundle {
  double alpha;
  double gamma;
  double eta;
  double gamma_bar;
};

/// Rates for the n-th visit of a pair (n counted after the increment).
/// Throws std::invalid_argument for n = 0.
RateBundle compute_rates(std::int64_t n, int horizon);

/// zeta = log(32 e (2T + 1) / delta).
double exploration_threshold(std::int64_t total_episodes, double delta);

/// Every learner table. Indices: pair = ((h-1) S + s) A + a,
/// value = (h-1) S + s with h = 1..H+1, bias = pair * S + s'.
struct UcbmqState {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;

  std::vector<std::int64_t> counts;
  std::vector<double> q;
  std::vector<double> qbar;
  std::vector<double> vbar;
  std::vector<double> bias_value;
  std::vector<double> target_sum;
  std::vector<double> target_sq_sum;
  std::vector<double> correction_sum;

  double zeta = 0.0;
  std::int64_t total_episodes = 0;
  double delta = 0.0;
  BonusMode bonus_mode = BonusMode::kSimplified;

  std::size_t pair(int h, int s, int a) const noexcept {
    return (static_cast<std::size_t>(h - 1) * num_states + s) * num_actions + a;
  }
  std::size_t value(int h, int s) const noexcept {
    return static_cast<std::size_t>(h - 1) * num_states + s;
  }
  std::size_t bias(int h, int s, int a, int next) const noexcept {
    return pair(h, s, a) * num_states + next;
  }

  std::span<const double> qbar_row(int h, int s) const {
    return {qbar.data() + pair(h, s, 0), static_cast<std::size_t>(num_actions)};
  }
  std::span<const double> vbar_row(int h) const {
    return {vbar.data() + value(h, 0), static_cast<std::size_t>(num_states)};
  }
  std::span<const double> bias_row(int h, int s, int a) const {
    return {bias_value.data() + bias(h, s, a, 0), static_cast<std::size_t>(num_states)};
  }
};

class UcbmqAgent final : public Agent {
 public:
  /// Q = 0, V_{h,s,a} = Vbar = H (zero past the horizon), Qbar = Q + the
  /// unvisited bonus. Throws std::invalid_argument unless total_episodes >= 3
  /// and delta lies in (0, 1).
  UcbmqAgent(int num_states, int num_actions, int horizon, std::int64_t total_episodes,
             double delta, BonusMode mode);

  const UcbmqState& state() const noexcept { return state_; }

  /// First maximizer of Qbar[h][s][.].
  int select_action(int h, int s) const;

  /// Empirical variance of the targets Vbar_{h+1}(s'_k) seen at (h, s, a).
  double compute_W(int h, int s, int a) const;

  double compute_bonus(int h, int s, int a) const;

  /// Applies one episode with all reads taken from the pre-episode tables.
  void update_after_episode(const Trajectory& trajectory);

  std::string_view name() const override { return "ucbmq"; }
  DeterministicPolicy begin_episode() override;
  int act(int h, int s) override { return select_action(h, s); }
  void observe(const Trajectory& trajectory) override { update_after_episode(trajectory); }

 private:
  UcbmqState state_;
};

/// teta[t][k] = eta_k prod_{l=k+1..t} (1 - eta_l), 1-based, with eta_k set by
/// the running visit count of flags[1..k] (eta_k = 0 when flags[k] = 0).
class CumulativeWeights {
 public:
  CumulativeWeights(std::span<const int> visit_flags, int horizon);

  int episodes() const noexcept { return episodes_; }
  double at(int t, int k) const {
    return weights_[static_cast<std::size_t>(t) * (episodes_ + 1) + k];
  }
  double eta(int k) const { return eta_[k]; }

 private:
  int episodes_;
  std::vector<double> eta_;
  std::vector<double> weights_;
};

inline CumulativeWeights cumulative_weights(std::span<const int> visit_flags, int horizon) {
  return CumulativeWeights(visit_flags, horizon);
}

}  // namespace ucbmq
