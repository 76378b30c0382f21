#include "ucbmq/ucbmq_agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ucbmq/bonus.hpp"

namespace ucbmq {

void validate_trajectory(const Trajectory& trajectory, int num_states, int num_actions,
                         int horizon) {
  if (static_cast<int>(trajectory.steps.size()) != horizon) {
    throw std::invalid_argument("trajectory has " + std::to_string(trajectory.steps.size()) +
                                " steps, expected " + std::to_string(horizon));
  }
  for (int i = 0; i < horizon; ++i) {
    const TransitionStep& step = trajectory.steps[i];
    if (step.h != i + 1) throw std::invalid_argument("trajectory steps are not h = 1..H in order");
    if (step.state < 0 || step.state >= num_states || step.next_state < 0 ||
        step.next_state >= num_states || step.action < 0 || step.action >= num_actions) {
      throw std::invalid_argument("trajectory step has an out-of-range index");
    }
  }
}

RateBundle compute_rates(std::int64_t n, int horizon) {
  if (n < 1) throw std::invalid_argument("compute_rates: visit count must be at least 1");
  const double nd = static_cast<double>(n);
  const double H = horizon;
  RateBundle r{};
  r.alpha = 1.0 / nd;
  r.gamma = (H / (H + nd)) * ((nd - 1.0) / nd);
  r.eta = (H + 1.0) / (H + nd);
  r.gamma_bar = H * (nd - 1.0) / (nd + H);
  return r;
}

double exploration_threshold(std::int64_t total_episodes, double delta) {
  return std::log(32.0 * std::numbers::e * (2.0 * static_cast<double>(total_episodes) + 1.0) /
                  delta);
}

UcbmqAgent::UcbmqAgent(int num_states, int num_actions, int horizon,
                       std::int64_t total_episodes, double delta, BonusMode mode) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("ucbmq: S, A and H must be positive");
  }
  if (total_episodes < 3) throw std::invalid_argument("ucbmq: episode budget T must be >= 3");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ucbmq: delta must lie in (0, 1)");

  UcbmqState& st = state_;
  st.num_states = num_states;
  st.num_actions = num_actions;
  st.horizon = horizon;
  st.total_episodes = total_episodes;
  st.delta = delta;
  st.bonus_mode = mode;
  st.zeta = exploration_threshold(total_episodes, delta);

  const std::size_t pairs = static_cast<std::size_t>(horizon) * num_states * num_actions;
  const double H = horizon;
  st.counts.assign(pairs, 0);
  st.q.assign(pairs, 0.0);
  st.qbar.assign(pairs, 0.0);
  st.target_sum.assign(pairs, 0.0);
  st.target_sq_sum.assign(pairs, 0.0);
  st.correction_sum.assign(pairs, 0.0);
  st.bias_value.assign(pairs * num_states, H);
  st.vbar.assign(static_cast<std::size_t>(horizon + 1) * num_states, H);
  std::fill(st.vbar.begin() + st.value(horizon + 1, 0), st.vbar.end(), 0.0);
  if (mode == BonusMode::kSimplified) {
    // Start from the same per-step cap H - h + 1 that the shared bonus uses.
    for (int h = 1; h <= horizon; ++h) {
      std::fill_n(st.vbar.begin() + st.value(h, 0), num_states, H - h + 1.0);
      std::fill_n(st.bias_value.begin() + st.bias(h, 0, 0, 0),
                  static_cast<std::size_t>(num_states) * num_actions * num_states, H - h);
    }
  }

  for (int h = 1; h <= horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) st.qbar[st.pair(h, s, a)] = compute_bonus(h, s, a);
    }
  }
}

int UcbmqAgent::select_action(int h, int s) const { return argmax_first(state_.qbar_row(h, s)); }

double UcbmqAgent::compute_W(int h, int s, int a) const {
  const std::size_t p = state_.pair(h, s, a);
  const std::int64_t n = state_.counts[p];
  if (n < 1) throw std::invalid_argument("compute_W: pair has not been visited");
  const double nd = static_cast<double>(n);
  const double mean = state_.target_sum[p] / nd;
  return std::max(0.0, state_.target_sq_sum[p] / nd - mean * mean);
}

double UcbmqAgent::compute_bonus(int h, int s, int a) const {
  const UcbmqState& st = state_;
  const std::int64_t n = st.counts[st.pair(h, s, a)];
  if (st.bonus_mode == BonusMode::kSimplified) return simplified_bonus(n, h, st.horizon);
  const double H = st.horizon;
  if (n == 0) return H;
  const double nd = static_cast<double>(n);
  const double log_t = std::log(static_cast<double>(st.total_episodes));
  return 2.0 * std::sqrt(compute_W(h, s, a) * st.zeta / nd) +
         53.0 * H * H * H * st.zeta * log_t / nd +
         st.correction_sum[st.pair(h, s, a)] / (H * log_t * nd);
}

void UcbmqAgent::update_after_episode(const Trajectory& trajectory) {
  UcbmqState& st = state_;
  validate_trajectory(trajectory, st.num_states, st.num_actions, st.horizon);
  const int S = st.num_states;
  const std::vector<double> vbar_snap = st.vbar;

  for (const TransitionStep& step : trajectory.steps) {
    const int h = step.h, s = step.state, a = step.action, next = step.next_state;
    const std::size_t p = st.pair(h, s, a);
    const RateBundle rates = compute_rates(++st.counts[p], st.horizon);

    // Each (h, s, a) is visited at most once per episode, so its bias row
    // still holds the pre-episode values here.
    double* bias = st.bias_value.data() + st.bias(h, s, a, 0);
    const double* vnext = vbar_snap.data() + st.value(h + 1, 0);
    const double target = vnext[next];
    const double bias_at_next = bias[next];

    st.target_sum[p] += target;
    st.target_sq_sum[p] += target * target;
    st.correction_sum[p] += rates.gamma_bar * (bias_at_next - target);

    st.q[p] = rates.alpha * (step.reward + target) + rates.gamma * (target - bias_at_next) +
              (1.0 - rates.alpha) * st.q[p];
    for (int sp = 0; sp < S; ++sp) {
      // Keep the convex combination inside its endpoints despite rounding.
      const double mixed = rates.eta * vnext[sp] + (1.0 - rates.eta) * bias[sp];
      bias[sp] = std::clamp(mixed, std::min(vnext[sp], bias[sp]), std::max(vnext[sp], bias[sp]));
    }

    st.qbar[p] = st.q[p] + compute_bonus(h, s, a);
    const auto row = st.qbar_row(h, s);
    const double best = *std::max_element(row.begin(), row.end());
    st.vbar[st.value(h, s)] = std::min(std::max(best, 0.0), vbar_snap[st.value(h, s)]);
  }
}

DeterministicPolicy UcbmqAgent::begin_episode() {
  DeterministicPolicy policy(state_.num_states, state_.horizon);
  for (int h = 1; h <= state_.horizon; ++h) {
    for (int s = 0; s < state_.num_states; ++s) policy.set_action(h, s, select_action(h, s));
  }
  return policy;
}

CumulativeWeights::CumulativeWeights(std::span<const int> visit_flags, int horizon)
    : episodes_(static_cast<int>(visit_flags.size())),
      eta_(visit_flags.size() + 1, 0.0),
      weights_((visit_flags.size() + 1) * (visit_flags.size() + 1), 0.0) {
  const double H = horizon;
  std::int64_t n = 0;
  for (int k = 1; k <= episodes_; ++k) {
    const int flag = visit_flags[k - 1];
    if (flag != 0 && flag != 1) throw std::invalid_argument("cumulative_weights: flags must be 0/1");
    if (flag == 1) {
      ++n;
      eta_[k] = (H + 1.0) / (H + static_cast<double>(n));
    }
  }
  const auto idx = [this](int t, int k) { return static_cast<std::size_t>(t) * (episodes_ + 1) + k; };
  for (int k = 1; k <= episodes_; ++k) {
    double w = eta_[k];
    weights_[idx(k, k)] = w;
    for (int t = k + 1; t <= episodes_; ++t) {
      w *= 1.0 - eta_[t];
      weights_[idx(t, k)] = w;
    }
  }
}

}  // namespace ucbmq
