#include "ucbmq/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ucbmq/environments.hpp"

namespace ucbmq {

namespace {

void require_params(const BoundParams& p) {
  if (p.num_states < 1 || p.num_actions < 1 || p.horizon < 1) {
    throw std::invalid_argument("bound: S, A and H must be positive");
  }
  if (p.episodes < 3) throw std::invalid_argument("bound: T must be at least 3");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("bound: delta must lie in (0, 1)");
}

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

// Natural logs of the two addends.
std::pair<double, double> bound_log_terms(const BoundParams& p) {
  const double zeta = exploration_threshold(p.episodes, p.delta);
  const double log_log_t = std::log(std::log(static_cast<double>(p.episodes)));
  const double log_s = std::log(static_cast<double>(p.num_states));
  const double log_a = std::log(static_cast<double>(p.num_actions));
  const double log_h = std::log(static_cast<double>(p.horizon));
  const double log_t = std::log(static_cast<double>(p.episodes));
  const double log_c1 = std::log(126.0) + 127.0 + log_log_t + 0.5 * std::log(zeta);
  const double log_c2 = std::log(3527.0) + 127.0 + 2.0 * log_log_t + std::log(zeta);
  const double first = log_c1 + 0.5 * (3.0 * log_h + log_s + log_a + log_t);
  const double second = log_c2 + 4.0 * log_h + log_s + log_a;
  return {first, second};
}

}  // namespace

double theoretical_bound_log10(const BoundParams& params) {
  require_params(params);
  const auto [first, second] = bound_log_terms(params);
  return log_sum_exp(first, second) / std::numbers::ln10;
}

double bound_log10_c1(const BoundParams& params) {
  require_params(params);
  const double zeta = exploration_threshold(params.episodes, params.delta);
  const double log_c1 = std::log(126.0) + 127.0 +
                        std::log(std::log(static_cast<double>(params.episodes))) +
                        0.5 * std::log(zeta);
  return log_c1 / std::numbers::ln10;
}

OptimismReport check_optimism(const OptimismTrace& trace, const ValueTable& optimal) {
  const int S = trace.num_states, A = trace.num_actions, H = trace.horizon;
  if (optimal.num_states() != S || optimal.num_actions() != A || optimal.horizon() != H) {
    throw std::invalid_argument("check_optimism: trace and optimal values disagree in shape");
  }
  constexpr double kSlack = 1e-9;
  OptimismReport report;
  for (const BoundSnapshot& snap : trace.snapshots) {
    if (snap.qbar.size() != static_cast<std::size_t>(H) * S * A ||
        snap.vbar.size() < static_cast<std::size_t>(H) * S) {
      throw std::invalid_argument("check_optimism: snapshot has the wrong size");
    }
    for (int h = 1; h <= H; ++h) {
      for (int s = 0; s < S; ++s) {
        const std::size_t v = static_cast<std::size_t>(h - 1) * S + s;
        if (snap.vbar[v] < optimal.v(h, s) - kSlack) ++report.v_violations;
        for (int a = 0; a < A; ++a) {
          if (snap.qbar[v * A + a] < optimal.q(h, s, a) - kSlack) ++report.q_violations;
        }
      }
    }
  }
  return report;
}

OptimismTrace record_ucbmq_trace(const TabularMDP& mdp, std::int64_t episodes, double delta,
                                 BonusMode mode, std::uint64_t seed) {
  UcbmqAgent agent(mdp.num_states(), mdp.num_actions(), mdp.horizon(), episodes, delta, mode);
  RandomStream rng(seed);
  OptimismTrace trace{mdp.num_states(), mdp.num_actions(), mdp.horizon(), {}};
  trace.snapshots.reserve(static_cast<std::size_t>(episodes) + 1);
  trace.snapshots.push_back({agent.state().qbar, agent.state().vbar});
  const ActionSelector select = [&agent](int h, int s) { return agent.select_action(h, s); };
  for (std::int64_t t = 1; t <= episodes; ++t) {
    agent.update_after_episode(sample_episode(mdp, select, rng));
    trace.snapshots.push_back({agent.state().qbar, agent.state().vbar});
  }
  return trace;
}

double count_lemma_lhs(std::span<const double> u) {
  double lhs = 0.0;
  double running = 0.0;  // U_t
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("count lemma: u_t must lie in [0, 1]");
    lhs += x / std::max(running, 1.0);
    running += x;
  }
  return lhs;
}

bool check_count_lemma(std::span<const double> u) {
  constexpr double kMargin = 1e-12;
  const double lhs = count_lemma_lhs(u);
  double total = 0.0;
  for (double x : u) total += x;
  if (lhs > 4.0 * std::log(total + 1.0) + kMargin) return false;
  if (u.size() >= 2 && lhs > 8.0 * std::log(static_cast<double>(u.size())) + kMargin) return false;
  return true;
}

bool check_weight_lemma(std::span<const int> flags, int horizon) {
  constexpr double kTol = 1e-12;
  const CumulativeWeights teta(flags, horizon);
  const int T = teta.episodes();
  const auto flag = [&](int k) { return flags[k - 1]; };

  int visits = 0;
  for (int t = 1; t <= T; ++t) {
    visits += flag(t);
    if (visits == 0) continue;
    double row = 0.0;
    for (int k = 1; k <= t; ++k) row += teta.at(t, k);
    if (std::abs(row - 1.0) > kTol) return false;
  }

  const double cap = 1.0 + 1.0 / horizon;
  for (int l = 1; l <= T; ++l) {
    double column = 0.0;
    for (int k = l; k + 1 <= T; ++k) {
      column += flag(k + 1) * teta.at(k, l);
      if (column > cap * flag(l) + kTol) return false;
    }
  }
  return true;
}

TotalVarianceReport check_total_variance(const TabularMDP& mdp, const DeterministicPolicy& policy) {
  const ValueTable values = evaluate_policy(mdp, policy);
  const VarianceTable variances = variance_recursion(mdp, policy);
  const OccupancyTable reach = occupancy(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();

  TotalVarianceReport report{};
  report.recursion = variances.v(1, mdp.initial_state());
  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double d = reach.at(h, s, a);
        if (d != 0.0) report.occupancy_sum += d * next_state_variance(mdp, h, s, a, values.value_row(h + 1));
      }
    }
  }

  const double mean = values.v(1, mdp.initial_state());
  for (const WeightedReturn& w : enumerate_trajectories(mdp, policy)) {
    const double dev = w.total_return - mean;
    report.enumerated += w.probability * dev * dev;
  }
  constexpr double kTol = 1e-9;
  report.passed = std::abs(report.recursion - report.enumerated) <= kTol &&
                  std::abs(report.recursion - report.occupancy_sum) <= kTol;
  return report;
}

double distribution_variance(std::span<const double> p, std::span<const double> f) {
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) mean += p[i] * f[i];
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) var += p[i] * (f[i] - mean) * (f[i] - mean);
  return var;
}

VarianceSwitchReport check_variance_switch(std::span<const double> p, std::span<const double> f,
                                           std::span<const double> g, double bound) {
  if (p.size() != f.size() || p.size() != g.size()) {
    throw std::invalid_argument("variance switch: size mismatch");
  }
  std::vector<double> f_squared(f.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(f[i] >= 0.0 && f[i] <= bound && g[i] >= 0.0 && g[i] <= bound)) {
      throw std::domain_error("variance switch: functions must take values in [0, b]");
    }
    f_squared[i] = f[i] * f[i];
    gap += p[i] * std::abs(f[i] - g[i]);
  }
  // Relative slack for the rounding in the three variance sums.
  constexpr double kSlack = 1e-12;
  VarianceSwitchReport r{};
  r.var_f = distribution_variance(p, f);
  r.var_g = distribution_variance(p, g);
  r.var_f_squared = distribution_variance(p, f_squared);
  r.mean_abs_gap = gap;
  const double rhs1 = 2.0 * r.var_g + 2.0 * bound * gap;
  const double rhs2 = 4.0 * bound * bound * r.var_f;
  r.first_holds = r.var_f <= rhs1 + kSlack * (1.0 + rhs1);
  r.second_holds = r.var_f_squared <= rhs2 + kSlack * (1.0 + rhs2);
  return r;
}

void record_visits(const UcbmqState& before, const Trajectory& trajectory,
                   std::map<PairKey, std::vector<VisitRecord>>& history) {
  for (const TransitionStep& step : trajectory.steps) {
    const double target = before.vbar[before.value(step.h + 1, step.next_state)];
    const double bias = before.bias_value[before.bias(step.h, step.state, step.action, step.next_state)];
    history[{step.h, step.state, step.action}].push_back({step.reward, target, bias});
  }
}

double unfolded_q(std::span<const VisitRecord> visits, int horizon) {
  if (visits.empty()) throw std::invalid_argument("unfolded_q: no visits");
  const double H = horizon;
  const double n = static_cast<double>(visits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double normalized_momentum = H * (k - 1.0) / (k + H);
    total += visits[i].target + normalized_momentum * (visits[i].target - visits[i].bias_at_next);
  }
  // Deterministic rewards: every visit carries the same r.
  return visits.front().reward + total / n;
}

double batch_empirical_variance(std::span<const VisitRecord> visits) {
  if (visits.empty()) throw std::invalid_argument("batch_empirical_variance: no visits");
  const double n = static_cast<double>(visits.size());
  double mean = 0.0;
  for (const VisitRecord& v : visits) mean += v.target;
  mean /= n;
  double var = 0.0;
  for (const VisitRecord& v : visits) var += (v.target - mean) * (v.target - mean);
  return var / n;
}

UcbmqInvariantMonitor::UcbmqInvariantMonitor(const UcbmqState& initial)
    : prev_vbar_(initial.vbar),
      prev_correction_(initial.correction_sum),
      prev_counts_(initial.counts) {
  full_sweep(initial);
}

void UcbmqInvariantMonitor::fail(std::string message) {
  // Keep the report readable when something breaks everywhere.
  if (failures_.size() < 50) failures_.push_back(std::move(message));
}

void UcbmqInvariantMonitor::observe(const UcbmqState& st) {
  ++episodes_;
  const int S = st.num_states, A = st.num_actions, H = st.horizon;
  const double Hd = H;
  constexpr double kDominanceSlack = 1e-12;
  const auto where = [&](const char* what, int h, int s) {
    std::ostringstream os;
    os << "episode " << episodes_ << ": " << what << " at h=" << h << " s=" << s;
    return os.str();
  };

  for (int h = 1; h <= H + 1; ++h) {
    for (int s = 0; s < S; ++s) {
      const double v = st.vbar[st.value(h, s)];
      if (v > prev_vbar_[st.value(h, s)]) fail(where("Vbar increased", h, s));
      if (v < 0.0 || v > Hd) fail(where("Vbar outside [0, H]", h, s));
      if (h == H + 1 && v != 0.0) fail(where("Vbar[H+1] nonzero", h, s));
    }
  }

  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const std::size_t p = st.pair(h, s, a);
        const double c = st.correction_sum[p];
        if (c < 0.0) fail(where("correction sum negative", h, s));
        if (c < prev_correction_[p]) fail(where("correction sum decreased", h, s));
        if (st.counts[p] == prev_counts_[p]) continue;
        for (int next = 0; next < S; ++next) {
          const double b = st.bias_value[st.bias(h, s, a, next)];
          if (b < st.vbar[st.value(h + 1, next)] - kDominanceSlack || b > Hd + kDominanceSlack) {
            fail(where("bias value not in [Vbar_{h+1}, H]", h, s));
          }
        }
      }
    }
  }

  prev_vbar_ = st.vbar;
  prev_correction_ = st.correction_sum;
  prev_counts_ = st.counts;
}

void UcbmqInvariantMonitor::full_sweep(const UcbmqState& st) {
  const int S = st.num_states, A = st.num_actions, H = st.horizon;
  constexpr double kDominanceSlack = 1e-12;
  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        for (int next = 0; next < S; ++next) {
          const double b = st.bias_value[st.bias(h, s, a, next)];
          if (b < st.vbar[st.value(h + 1, next)] - kDominanceSlack || b > H + kDominanceSlack) {
            std::ostringstream os;
            os << "sweep after episode " << episodes_ << ": bias value at (h=" << h << ", s=" << s
               << ", a=" << a << ", s'=" << next << ") = " << b << " below Vbar_{h+1} = "
               << st.vbar[st.value(h + 1, next)];
            fail(os.str());
          }
        }
      }
    }
  }
}

}  // namespace ucbmq
