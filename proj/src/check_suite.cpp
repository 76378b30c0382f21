#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ucbmq/checks.hpp"
#include "ucbmq/environments.hpp"

namespace ucbmq {

namespace {

DeterministicPolicy random_policy(const TabularMDP& mdp, RandomStream& rng) {
  DeterministicPolicy policy(mdp.num_states(), mdp.horizon());
  for (int h = 1; h <= mdp.horizon(); ++h) {
    for (int s = 0; s < mdp.num_states(); ++s) {
      policy.set_action(h, s, rng.uniform_int(mdp.num_actions()));
    }
  }
  return policy;
}

std::string describe_mdp(int S, int A, int H, std::uint64_t seed) {
  std::ostringstream os;
  os << "build_random_mdp(S=" << S << ", A=" << A << ", H=" << H << ", seed=" << seed << ")";
  return os.str();
}

CheckResult bellman_consistency() {
  RandomStream rng(11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int S = 1 + rng.uniform_int(6), A = 1 + rng.uniform_int(4), H = 1 + rng.uniform_int(6);
    const TabularMDP mdp = build_random_mdp(S, A, H, seed);
    const ValueTable opt = backward_induction(mdp);
    for (int h = 1; h <= H; ++h) {
      for (int s = 0; s < S; ++s) {
        double best = opt.q(h, s, 0);
        for (int a = 0; a < A; ++a) {
          double backup = mdp.reward(h, s, a);
          for (int next = 0; next < S; ++next) backup += mdp.transition(h, s, a, next) * opt.v(h + 1, next);
          if (std::abs(backup - opt.q(h, s, a)) > 1e-12) {
            return {"bellman_consistency", false, describe_mdp(S, A, H, seed)};
          }
          best = std::max(best, opt.q(h, s, a));
        }
        if (best != opt.v(h, s)) return {"bellman_consistency", false, describe_mdp(S, A, H, seed)};
      }
    }
  }
  return {"bellman_consistency", true, "50 random MDPs"};
}

CheckResult optimal_dominance_and_occupancy() {
  RandomStream rng(12);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int S = 1 + rng.uniform_int(6), A = 1 + rng.uniform_int(4), H = 1 + rng.uniform_int(6);
    const TabularMDP mdp = build_random_mdp(S, A, H, seed);
    const ValueTable opt = backward_induction(mdp);
    const DeterministicPolicy policy = random_policy(mdp, rng);
    const ValueTable val = evaluate_policy(mdp, policy);
    const OccupancyTable reach = occupancy(mdp, policy);
    for (int h = 1; h <= H; ++h) {
      if (std::abs(reach.step_mass(h) - 1.0) > 1e-12) {
        return {"dominance_and_occupancy", false, "occupancy mass at h=" + std::to_string(h) +
                                                       " for " + describe_mdp(S, A, H, seed)};
      }
      for (int s = 0; s < S; ++s) {
        if (val.v(h, s) > opt.v(h, s)) {
          return {"dominance_and_occupancy", false, "V^pi > V* for " + describe_mdp(S, A, H, seed)};
        }
      }
    }
  }
  return {"dominance_and_occupancy", true, "50 random MDPs x random policies"};
}

CheckResult total_variance() {
  RandomStream rng(13);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int S = 1 + rng.uniform_int(4), A = 1 + rng.uniform_int(3), H = 1 + rng.uniform_int(5);
    const TabularMDP mdp = build_random_mdp(S, A, H, seed);
    const TotalVarianceReport r = check_total_variance(mdp, random_policy(mdp, rng));
    if (!r.passed) {
      std::ostringstream os;
      os.precision(17);
      os << describe_mdp(S, A, H, seed) << ": recursion=" << r.recursion
         << " occupancy=" << r.occupancy_sum << " enumerated=" << r.enumerated;
      return {"law_of_total_variance", false, os.str()};
    }
  }
  return {"law_of_total_variance", true, "100 random MDPs, tolerance 1e-9"};
}

CheckResult weight_lemma() {
  RandomStream rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const int T = 1 + rng.uniform_int(60);
    const int H = 1 + rng.uniform_int(20);
    const double density = rng.uniform();
    std::vector<int> flags(T);
    for (int& f : flags) f = rng.uniform() < density ? 1 : 0;
    if (!check_weight_lemma(flags, H)) {
      std::ostringstream os;
      os << "H=" << H << " flags=";
      for (int f : flags) os << f;
      return {"weight_lemma", false, os.str()};
    }
  }
  return {"weight_lemma", true, "1000 random flag sequences"};
}

CheckResult count_lemma() {
  RandomStream rng(15);
  for (int trial = 0; trial < 10000; ++trial) {
    const int len = 1 + rng.uniform_int(200);
    std::vector<double> u(len);
    const int kind = rng.uniform_int(3);
    for (double& x : u) {
      x = kind == 0 ? rng.uniform() : kind == 1 ? (rng.uniform() < 0.5 ? 1.0 : 0.0) : 1.0;
    }
    if (!check_count_lemma(u)) {
      std::ostringstream os;
      os.precision(17);
      os << "u=";
      for (double x : u) os << x << ' ';
      return {"count_lemma", false, os.str()};
    }
  }
  return {"count_lemma", true, "10000 random sequences"};
}

CheckResult variance_switch() {
  RandomStream rng(16);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + rng.uniform_int(8);
    const double b = 0.1 + 10.0 * rng.uniform();
    std::vector<double> p(n), f(n), g(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = rng.uniform() + 1e-6;
      total += p[i];
      f[i] = b * rng.uniform();
      g[i] = b * rng.uniform();
    }
    for (double& x : p) x /= total;
    const VarianceSwitchReport r = check_variance_switch(p, f, g, b);
    if (!r.first_holds || !r.second_holds) {
      std::ostringstream os;
      os.precision(17);
      os << "b=" << b << " var_f=" << r.var_f << " var_g=" << r.var_g << " var_f2=" << r.var_f_squared;
      return {"variance_switch", false, os.str()};
    }
  }
  return {"variance_switch", true, "10000 random (p, f, g, b)"};
}

CheckResult ucbmq_replay() {
  double worst_q = 0.0, worst_w = 0.0;
  std::int64_t run_visits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int S = 2 + static_cast<int>(seed % 3), A = 2, H = 2 + static_cast<int>(seed % 4);
    const TabularMDP mdp = build_random_mdp(S, A, H, 1000 + seed);
    UcbmqAgent agent(S, A, H, 60, 0.1, seed % 2 ? BonusMode::kSimplified : BonusMode::kTheoretical);
    RandomStream rng(seed);
    std::map<PairKey, std::vector<VisitRecord>> history;
    UcbmqInvariantMonitor monitor(agent.state());
    const ActionSelector select = [&agent](int h, int s) { return agent.select_action(h, s); };
    for (int t = 0; t < 60; ++t) {
      const Trajectory traj = sample_episode(mdp, select, rng);
      record_visits(agent.state(), traj, history);
      agent.update_after_episode(traj);
      monitor.observe(agent.state());
    }
    monitor.full_sweep(agent.state());
    if (!monitor.ok()) return {"ucbmq_structure", false, monitor.failures().front()};
    for (const auto& [key, visits] : history) {
      const auto [h, s, a] = key;
      worst_q = std::max(worst_q, std::abs(unfolded_q(visits, H) - agent.state().q[agent.state().pair(h, s, a)]));
      worst_w = std::max(worst_w, std::abs(batch_empirical_variance(visits) - agent.compute_W(h, s, a)));
      run_visits += static_cast<std::int64_t>(visits.size());
    }
  }
  std::ostringstream os;
  os << "100 runs, " << run_visits << " visits; max |Q - unfolded| = " << worst_q
     << ", max |W - batch| = " << worst_w;
  return {"ucbmq_replay_and_structure", worst_q <= 1e-9 && worst_w <= 1e-9, os.str()};
}

CheckResult optimism_frequency() {
  constexpr int kRuns = 50;
  constexpr double kDelta = 0.1;
  int violating = 0;
  for (int run = 0; run < kRuns; ++run) {
    const TabularMDP mdp = build_random_mdp(4, 2, 3, 5000 + run);
    const OptimismTrace trace = record_ucbmq_trace(mdp, 200, kDelta, BonusMode::kTheoretical, run);
    if (check_optimism(trace, backward_induction(mdp)).any()) ++violating;
  }
  const double fraction = static_cast<double>(violating) / kRuns;
  std::ostringstream os;
  os << violating << "/" << kRuns << " runs with a violation (limit delta = " << kDelta << ")";
  return {"optimism_frequency", fraction <= kDelta, os.str()};
}

CheckResult bound_evaluator() {
  const BoundParams base{50, 4, 100, 3000, 0.1};
  const double value = theoretical_bound_log10(base);
  bool ok = value > std::log10(100.0 * 3000.0) && value > 127.0 / std::numbers::ln10;
  BoundParams bigger = base;
  bigger.episodes *= 2;
  ok = ok && theoretical_bound_log10(bigger) >= value;
  std::ostringstream os;
  os.precision(10);
  os << "log10 bound(S=50, A=4, H=100, T=3000, delta=0.1) = " << value
     << " (trivial bound log10(HT) = " << std::log10(3e5) << ")";
  return {"regret_bound_evaluator", ok, os.str()};
}

}  // namespace

std::vector<CheckResult> run_check_suite() {
  return {bellman_consistency(), optimal_dominance_and_occupancy(), total_variance(),
          weight_lemma(),        count_lemma(),                      variance_switch(),
          ucbmq_replay(),        optimism_frequency(),               bound_evaluator()};
}

}  // namespace ucbmq
