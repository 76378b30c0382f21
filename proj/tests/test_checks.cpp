#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>

#include "ucbmq/checks.hpp"
#include "ucbmq/environments.hpp"

using namespace ucbmq;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

// log10 of the bound, computed in 50-digit arithmetic directly in the
// linear domain (no log-space tricks).
double big_bound_log10(double S, double A, double H, double T, double delta, bool c1_only = false) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using boost::multiprecision::log10;
  using boost::multiprecision::sqrt;
  const Big e127 = exp(Big(127));
  const Big logT = log(Big(T));
  const Big zeta = log(Big(32) * exp(Big(1)) * (Big(2) * Big(T) + 1) / Big(delta));
  const Big c1 = Big(126) * e127 * logT * sqrt(zeta);
  if (c1_only) return static_cast<double>(log10(c1));
  const Big c2 = Big(3527) * e127 * logT * logT * zeta;
  const Big total = c1 * sqrt(Big(H) * H * H * S * A * T) + c2 * Big(H) * H * H * H * S * A;
  return static_cast<double>(log10(total));
}

std::vector<double> random_distribution(RandomStream& rng, int n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) total += (x = rng.uniform() + 1e-3);
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

TEST(BoundEvaluator, MatchesExtendedPrecision) {
  const BoundParams cases[] = {
      {50, 4, 100, 3000, 0.1}, {1, 1, 1, 3, 0.5}, {10, 2, 5, 100000, 0.01}, {500, 10, 1000, 1000000000, 1e-6}};
  for (const BoundParams& p : cases) {
    const double oracle = big_bound_log10(p.num_states, p.num_actions, p.horizon, p.episodes, p.delta);
    EXPECT_NEAR(theoretical_bound_log10(p), oracle, 1e-9);
    const double c1 = big_bound_log10(p.num_states, p.num_actions, p.horizon, p.episodes, p.delta, true);
    EXPECT_NEAR(bound_log10_c1(p), c1, 1e-9);
  }
}

TEST(BoundEvaluator, ExponentialFactorDigits) {
  const double digits = static_cast<double>(boost::multiprecision::log10(boost::multiprecision::exp(Big(127))));
  EXPECT_NEAR(127.0 / std::numbers::ln10, digits, 1e-12);
  EXPECT_NEAR(digits, 55.1554, 1e-4);
  const BoundParams p{50, 4, 100, 3000, 0.1};
  const double zeta = std::log(32.0 * std::numbers::e * 6001.0 / 0.1);
  const double by_hand =
      127.0 / std::numbers::ln10 + std::log10(126.0 * std::log(3000.0) * std::sqrt(zeta));
  EXPECT_NEAR(bound_log10_c1(p), by_hand, 1e-9);
}

TEST(BoundEvaluator, ExceedsTrivialBoundAtDeskScale) {
  for (std::int64_t T : {3, 100, 3000, 1000000}) {
    for (std::int64_t H : {1, 10, 100}) {
      const BoundParams p{50, 4, H, T, 0.1};
      EXPECT_GT(theoretical_bound_log10(p), std::log10(static_cast<double>(H * T)));
    }
  }
}

TEST(BoundEvaluator, MonotoneInEachArgument) {
  const BoundParams base{10, 3, 20, 1000, 0.1};
  const double b0 = theoretical_bound_log10(base);
  for (int k = 2; k <= 50; ++k) {
    BoundParams p = base;
    p.num_states *= k;
    EXPECT_GE(theoretical_bound_log10(p), b0);
    p = base;
    p.num_actions *= k;
    EXPECT_GE(theoretical_bound_log10(p), b0);
    p = base;
    p.horizon *= k;
    EXPECT_GE(theoretical_bound_log10(p), b0);
    p = base;
    p.episodes *= k;
    EXPECT_GE(theoretical_bound_log10(p), b0);
  }
}

TEST(BoundEvaluator, RejectsInvalidParameters) {
  EXPECT_THROW(theoretical_bound_log10({0, 1, 1, 10, 0.1}), std::invalid_argument);
  EXPECT_THROW(theoretical_bound_log10({1, 1, 1, 2, 0.1}), std::invalid_argument);
  EXPECT_THROW(theoretical_bound_log10({1, 1, 1, 10, 1.0}), std::invalid_argument);
}

TEST(Optimism, FreshInitialisationHasNoViolations) {
  const TabularMDP mdp = build_random_mdp(4, 2, 3, 1);
  OptimismTrace trace = record_ucbmq_trace(mdp, 3, 0.1, BonusMode::kTheoretical, 0);
  ASSERT_EQ(trace.snapshots.size(), 4u);
  trace.snapshots.resize(1);
  EXPECT_FALSE(check_optimism(trace, backward_induction(mdp)).any());
}

TEST(Optimism, DetectsPlantedViolation) {
  const TabularMDP mdp = build_random_mdp(4, 2, 3, 1);
  OptimismTrace trace = record_ucbmq_trace(mdp, 3, 0.1, BonusMode::kTheoretical, 0);
  trace.snapshots[2].qbar[0] = -1.0;
  trace.snapshots[1].vbar[0] = -1.0;
  const OptimismReport r = check_optimism(trace, backward_induction(mdp));
  EXPECT_EQ(r.q_violations, 1);
  EXPECT_EQ(r.v_violations, 1);
}

TEST(Optimism, ShapeMismatchThrows) {
  const TabularMDP mdp = build_random_mdp(4, 2, 3, 1);
  const OptimismTrace trace = record_ucbmq_trace(mdp, 3, 0.1, BonusMode::kTheoretical, 0);
  EXPECT_THROW(check_optimism(trace, backward_induction(build_random_mdp(5, 2, 3, 1))),
               std::invalid_argument);
}

TEST(Optimism, TheoreticalBonusFrequencyWithinDelta) {
  int violating = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMDP mdp = build_random_mdp(4, 2, 3, seed);
    const OptimismTrace trace = record_ucbmq_trace(mdp, 200, 0.1, BonusMode::kTheoretical, seed);
    const OptimismReport r = check_optimism(trace, backward_induction(mdp));
    violating += r.q_violations > 0 ? 1 : 0;
  }
  EXPECT_LE(violating, 5);
}

TEST(CountLemma, Examples) {
  const std::vector<double> zeros(11, 0.0);
  EXPECT_EQ(count_lemma_lhs(zeros), 0.0);
  EXPECT_TRUE(check_count_lemma(zeros));

  // u_1..u_11 all ones: 1/1 + sum_{t=1..10} 1/t.
  const std::vector<double> ones(11, 1.0);
  double harmonic = 1.0;
  for (int t = 1; t <= 10; ++t) harmonic += 1.0 / t;
  EXPECT_NEAR(count_lemma_lhs(ones), harmonic, 1e-12);
  EXPECT_NEAR(harmonic, 3.93, 5e-3);
  EXPECT_LE(harmonic, 4.0 * std::log(12.0));
  EXPECT_TRUE(check_count_lemma(ones));

  const std::vector<double> bad = {0.5, 1.5};
  EXPECT_THROW(check_count_lemma(bad), std::domain_error);
}

TEST(CountLemma, RandomSequences) {
  RandomStream rng(8);
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<double> u(1 + rng.uniform_int(200));
    const int style = rep % 3;
    for (double& x : u) {
      x = style == 0 ? rng.uniform() : style == 1 ? (rng.uniform() < 0.5 ? 1.0 : 0.0) : rng.uniform() * 0.01;
    }
    ASSERT_TRUE(check_count_lemma(u)) << "rep " << rep;
  }
}

TEST(WeightLemma, EmptyAndRandom) {
  EXPECT_TRUE(check_weight_lemma(std::vector<int>(20, 0), 5));
  EXPECT_TRUE(check_weight_lemma(std::vector<int>(20, 1), 1));
  RandomStream rng(12);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<int> flags(1 + rng.uniform_int(120));
    const double rate = rng.uniform();
    for (int& f : flags) f = rng.uniform() < rate ? 1 : 0;
    ASSERT_TRUE(check_weight_lemma(flags, 1 + rng.uniform_int(20))) << "rep " << rep;
  }
}

TEST(WeightLemma, ColumnBoundByDirectSum) {
  // Independent recomputation of the column sums for one sequence.
  const std::vector<int> flags = {1, 0, 1, 1, 0, 1, 1, 1, 0, 1};
  const int H = 2;
  const CumulativeWeights w = cumulative_weights(flags, H);
  const int T = static_cast<int>(flags.size());
  for (int l = 1; l <= T; ++l) {
    double col = 0.0;
    for (int k = l; k < T; ++k) col += flags[k] * w.at(k, l);
    EXPECT_LE(col, (1.0 + 1.0 / H) * flags[l - 1] + 1e-12);
  }
}

TEST(TotalVariance, DeterministicAndBernoulli) {
  const TotalVarianceReport det = check_total_variance(build_chain(3, 4), DeterministicPolicy(3, 4, 1));
  EXPECT_TRUE(det.passed);
  EXPECT_EQ(det.recursion, 0.0);
  EXPECT_EQ(det.enumerated, 0.0);

  std::vector<double> p(8, 0.5), r(4, 0.0);
  r[3] = 1.0;  // h = 2, s = 1
  const TabularMDP mdp(2, 1, 2, p, r, 0);
  const TotalVarianceReport b = check_total_variance(mdp, DeterministicPolicy(2, 2, 0));
  EXPECT_TRUE(b.passed);
  EXPECT_NEAR(b.recursion, 0.25, 1e-15);
  EXPECT_NEAR(b.enumerated, 0.25, 1e-15);
  EXPECT_NEAR(b.occupancy_sum, 0.25, 1e-15);
}

TEST(TotalVariance, RandomInstancesAgreeWithEnumeration) {
  RandomStream rng(31);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int S = 2 + rng.uniform_int(3), A = 1 + rng.uniform_int(3), H = 1 + rng.uniform_int(5);
    const TabularMDP mdp = build_random_mdp(S, A, H, seed);
    DeterministicPolicy pi(S, H);
    for (int h = 1; h <= H; ++h)
      for (int s = 0; s < S; ++s) pi.set_action(h, s, rng.uniform_int(A));
    const TotalVarianceReport rep = check_total_variance(mdp, pi);
    EXPECT_TRUE(rep.passed) << "seed " << seed;
    EXPECT_NEAR(rep.recursion, rep.enumerated, 1e-9);
    EXPECT_NEAR(rep.recursion, rep.occupancy_sum, 1e-9);
  }
}

TEST(TotalVariance, GuardPropagates) {
  const TabularMDP mdp = build_random_mdp(10, 1, 7, 1);
  EXPECT_THROW(check_total_variance(mdp, DeterministicPolicy(10, 7, 0)), InstanceTooLarge);
}

TEST(VarianceSwitch, RandomInstances) {
  RandomStream rng(77);
  for (int rep = 0; rep < 5000; ++rep) {
    const int n = 2 + rng.uniform_int(8);
    const double b = 0.1 + 10.0 * rng.uniform();
    const auto p = random_distribution(rng, n);
    std::vector<double> f(n), g(n);
    for (int i = 0; i < n; ++i) {
      f[i] = b * rng.uniform();
      g[i] = b * rng.uniform();
    }
    const VarianceSwitchReport r = check_variance_switch(p, f, g, b);
    ASSERT_TRUE(r.first_holds) << "rep " << rep;
    ASSERT_TRUE(r.second_holds) << "rep " << rep;
  }
}

TEST(VarianceSwitch, SquaredFunctionNeedsFourBSquared) {
  // Two-point f near the top of [0, b]: Var(f^2) / Var(f) = (f1 + f2)^2,
  // which approaches 4 b^2 and exceeds both 2 b and 2 b^2.
  const double b = 3.0;
  const std::vector<double> p = {0.5, 0.5};
  const std::vector<double> f = {b, b - 1e-3};
  const VarianceSwitchReport r = check_variance_switch(p, f, f, b);
  EXPECT_GT(r.var_f_squared, 2.0 * b * r.var_f);
  EXPECT_GT(r.var_f_squared, 2.0 * b * b * r.var_f);
  EXPECT_LE(r.var_f_squared, 4.0 * b * b * r.var_f * (1.0 + 1e-12));
  EXPECT_TRUE(r.second_holds);
}

TEST(VarianceSwitch, RejectsOutOfRangeValues) {
  const std::vector<double> p = {0.5, 0.5}, f = {0.0, 2.0}, g = {0.0, 0.5};
  EXPECT_THROW(check_variance_switch(p, f, g, 1.0), std::domain_error);
}

TEST(InvariantMonitor, CleanRunAndPlantedFailure) {
  const TabularMDP mdp = build_random_mdp(4, 2, 4, 3);
  UcbmqAgent agent(4, 2, 4, 100, 0.1, BonusMode::kSimplified);
  UcbmqInvariantMonitor monitor(agent.state());
  RandomStream rng(0);
  for (int t = 0; t < 100; ++t) {
    agent.observe(sample_episode(mdp, [&](int h, int s) { return agent.act(h, s); }, rng));
    monitor.observe(agent.state());
  }
  monitor.full_sweep(agent.state());
  EXPECT_TRUE(monitor.ok());
  EXPECT_EQ(monitor.episodes_checked(), 100);

  UcbmqState broken = agent.state();
  broken.vbar[0] += 1.0;
  monitor.observe(broken);
  EXPECT_FALSE(monitor.ok());
}

TEST(ReplayHelpers, UnfoldedFormAndBatchVariance) {
  const std::vector<VisitRecord> visits = {{0.5, 4.0, 4.0}, {0.5, 2.0, 3.0}};
  EXPECT_DOUBLE_EQ(batch_empirical_variance(visits), 1.0);
  // gbar_1 = 0, gbar_2 = H / (2 + H) with H = 2 -> 1/2.
  EXPECT_DOUBLE_EQ(unfolded_q(visits, 2), 0.5 + 0.5 * (4.0 + 2.0 + 0.5 * (2.0 - 3.0)));
}
