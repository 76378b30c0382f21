#include "ucbmq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ucbmq {

double simplified_bonus(std::int64_t n, int h, int horizon) {
  if (n < 0) throw std::invalid_argument("simplified_bonus: negative count");
  const double remaining = horizon - h + 1;
  if (n == 0) return remaining;
  const double nd = static_cast<double>(n);
  return std::min(std::sqrt(1.0 / nd) + remaining / nd, remaining);
}

namespace {

void check_shape(int num_states, int num_actions, int horizon) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("agent: S, A and H must be positive");
  }
}

template <class State>
DeterministicPolicy greedy_on(const State& st) {
  DeterministicPolicy policy(st.num_states, st.horizon);
  for (int h = 1; h <= st.horizon; ++h) {
    for (int s = 0; s < st.num_states; ++s) policy.set_action(h, s, argmax_first(st.qbar_row(h, s)));
  }
  return policy;
}

// Qbar = Vbar = H - h + 1 for h <= H, Vbar[H + 1] = 0.
template <class State>
void fill_remaining_horizon(State& st) {
  const std::size_t pairs = static_cast<std::size_t>(st.horizon) * st.num_states * st.num_actions;
  st.qbar.assign(pairs, 0.0);
  st.vbar.assign(static_cast<std::size_t>(st.horizon + 1) * st.num_states, 0.0);
  for (int h = 1; h <= st.horizon; ++h) {
    const double remaining = st.horizon - h + 1;
    for (int s = 0; s < st.num_states; ++s) {
      st.vbar[st.value(h, s)] = remaining;
      for (int a = 0; a < st.num_actions; ++a) st.qbar[st.pair(h, s, a)] = remaining;
    }
  }
}

}  // namespace

OptQLAgent::OptQLAgent(int num_states, int num_actions, int horizon, BaselineOptions options)
    : options_(options) {
  check_shape(num_states, num_actions, horizon);
  state_.num_states = num_states;
  state_.num_actions = num_actions;
  state_.horizon = horizon;
  state_.counts.assign(static_cast<std::size_t>(horizon) * num_states * num_actions, 0);
  fill_remaining_horizon(state_);
}

void OptQLAgent::update(const Trajectory& trajectory) {
  OptQLState& st = state_;
  validate_trajectory(trajectory, st.num_states, st.num_actions, st.horizon);
  const std::vector<double> vbar_snap = st.vbar;
  const double H = st.horizon;
  for (const TransitionStep& step : trajectory.steps) {
    const std::size_t p = st.pair(step.h, step.state, step.action);
    const std::int64_t n = ++st.counts[p];
    const double eta = (H + 1.0) / (H + static_cast<double>(n));
    const double target = step.reward + vbar_snap[st.value(step.h + 1, step.next_state)] +
                          options_.bonus_scale * simplified_bonus(n, step.h, st.horizon);
    st.qbar[p] = (1.0 - eta) * st.qbar[p] + eta * target;
    const auto row = st.qbar_row(step.h, step.state);
    const double best = *std::max_element(row.begin(), row.end());
    const std::size_t v = st.value(step.h, step.state);
    st.vbar[v] = std::min({H - step.h + 1.0, best, vbar_snap[v]});
  }
}

DeterministicPolicy OptQLAgent::begin_episode() { return greedy_on(state_); }

double UcbviState::empirical_probability(int h, int s, int a, int next) const {
  const std::size_t p = pair(h, s, a);
  if (counts[p] == 0) return 1.0 / num_states;
  return transition_counts[p * num_states + next] / static_cast<double>(counts[p]);
}

UcbviState make_ucbvi_state(int num_states, int num_actions, int horizon) {
  check_shape(num_states, num_actions, horizon);
  UcbviState st;
  st.num_states = num_states;
  st.num_actions = num_actions;
  st.horizon = horizon;
  const std::size_t pairs = static_cast<std::size_t>(horizon) * num_states * num_actions;
  st.counts.assign(pairs, 0);
  st.transition_counts.assign(pairs * num_states, 0.0);
  st.reward_estimate.assign(pairs, 0.0);
  st.observed_next.assign(pairs, {});
  fill_remaining_horizon(st);
  return st;
}

void record_transitions(UcbviState& st, const Trajectory& trajectory) {
  validate_trajectory(trajectory, st.num_states, st.num_actions, st.horizon);
  for (const TransitionStep& step : trajectory.steps) {
    const std::size_t p = st.pair(step.h, step.state, step.action);
    ++st.counts[p];
    double& m = st.transition_counts[p * st.num_states + step.next_state];
    if (m == 0.0) st.observed_next[p].push_back(step.next_state);
    m += 1.0;
    st.reward_estimate[p] = step.reward;
  }
}

void inject_model(UcbviState& st, const TabularMDP& mdp) {
  if (mdp.num_states() != st.num_states || mdp.num_actions() != st.num_actions ||
      mdp.horizon() != st.horizon) {
    throw std::invalid_argument("inject_model: shape mismatch");
  }
  for (int h = 1; h <= st.horizon; ++h) {
    for (int s = 0; s < st.num_states; ++s) {
      for (int a = 0; a < st.num_actions; ++a) {
        const std::size_t p = st.pair(h, s, a);
        st.counts[p] = 1;
        st.reward_estimate[p] = mdp.reward(h, s, a);
        st.observed_next[p].clear();
        std::fill_n(st.transition_counts.begin() + p * st.num_states, st.num_states, 0.0);
        for (const Successor& succ : mdp.successors(h, s, a)) {
          st.transition_counts[p * st.num_states + succ.state] = succ.probability;
          st.observed_next[p].push_back(succ.state);
        }
      }
    }
  }
}

namespace {

double mean_of(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

// Optimistic one-step backup of (h, s, a) against Vbar[h + 1].
double backup(const UcbviState& st, int h, int s, int a, double uniform_next_mean,
              const BaselineOptions& options) {
  const std::size_t p = st.pair(h, s, a);
  const std::int64_t n = st.counts[p];
  const double* vnext = st.vbar.data() + st.value(h + 1, 0);
  double expected = uniform_next_mean;
  if (n > 0) {
    expected = 0.0;
    const double nd = static_cast<double>(n);
    for (int next : st.observed_next[p]) {
      expected += st.transition_counts[p * st.num_states + next] / nd * vnext[next];
    }
  }
  const double q = st.reward_estimate[p] +
                   options.bonus_scale * simplified_bonus(n, h, st.horizon) + expected;
  return std::min(static_cast<double>(st.horizon - h + 1), q);
}

}  // namespace

void ucbvi_plan(UcbviState& st, const BaselineOptions& options) {
  for (int h = st.horizon; h >= 1; --h) {
    const double uniform_mean = mean_of(
        {st.vbar.data() + st.value(h + 1, 0), static_cast<std::size_t>(st.num_states)});
    for (int s = 0; s < st.num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < st.num_actions; ++a) {
        const double q = backup(st, h, s, a, uniform_mean, options);
        st.qbar[st.pair(h, s, a)] = q;
        best = std::max(best, q);
      }
      double& v = st.vbar[st.value(h, s)];
      v = std::min(v, best);
    }
  }
}

int ucbvi_greedy_step(UcbviState& st, int h, int s, const BaselineOptions& options) {
  const double uniform_mean =
      mean_of({st.vbar.data() + st.value(h + 1, 0), static_cast<std::size_t>(st.num_states)});
  for (int a = 0; a < st.num_actions; ++a) {
    st.qbar[st.pair(h, s, a)] = backup(st, h, s, a, uniform_mean, options);
  }
  const auto row = st.qbar_row(h, s);
  const int best = argmax_first(row);
  double& v = st.vbar[st.value(h, s)];
  v = std::min(v, row[best]);
  return best;
}

UcbviAgent::UcbviAgent(int num_states, int num_actions, int horizon, BaselineOptions options)
    : state_(make_ucbvi_state(num_states, num_actions, horizon)), options_(options) {}

DeterministicPolicy UcbviAgent::begin_episode() { return greedy_on(state_); }

void UcbviAgent::observe(const Trajectory& trajectory) {
  record_transitions(state_, trajectory);
  ucbvi_plan(state_, options_);
}

UcbviGreedyAgent::UcbviGreedyAgent(int num_states, int num_actions, int horizon,
                                   BaselineOptions options)
    : state_(make_ucbvi_state(num_states, num_actions, horizon)), options_(options) {}

DeterministicPolicy UcbviGreedyAgent::begin_episode() { return greedy_on(state_); }

UniformRandomAgent::UniformRandomAgent(int num_states, int num_actions, int horizon,
                                       std::uint64_t seed)
    : num_actions_(num_actions), rng_(seed), current_(num_states, horizon) {
  check_shape(num_states, num_actions, horizon);
}

DeterministicPolicy UniformRandomAgent::begin_episode() {
  for (int h = 1; h <= current_.horizon(); ++h) {
    for (int s = 0; s < current_.num_states(); ++s) {
      current_.set_action(h, s, rng_.uniform_int(num_actions_));
    }
  }
  return current_;
}

}  // namespace ucbmq
