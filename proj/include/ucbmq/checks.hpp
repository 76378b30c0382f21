#pragma once

// Executable versions of the properties the UCBMQ analysis relies on:
// optimism of the upper bounds, the weight and count lemmas, the law of
// total variance, the variance switching inequalities, and a log-space
// evaluator for the high-probability regret bound.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ucbmq/mdp.hpp"
#include "ucbmq/ucbmq_agent.hpp"

namespace ucbmq {

struct BoundParams {
  std::int64_t num_states;
  std::int64_t num_actions;
  std::int64_t horizon;
  std::int64_t episodes;
  double delta;
};

/// log10 of C1 sqrt(H^3 S A T) + C2 H^4 S A, evaluated in log space since
/// the e^127 factor overflows a double. C1 = 126 e^127 log(T) sqrt(zeta),
/// C2 = 3527 e^127 log(T)^2 zeta.
double theoretical_bound_log10(const BoundParams& params);

/// log10 C1 alone.
double bound_log10_c1(const BoundParams& params);

/// Qbar / Vbar tables of one episode boundary (Vbar includes the H+1 row).
struct BoundSnapshot {
  std::vector<double> qbar;
  std::vector<double> vbar;
};

struct OptimismTrace {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<BoundSnapshot> snapshots;  // index t = 0..T
};

struct OptimismReport {
  std::int64_t q_violations = 0;
  std::int64_t v_violations = 0;
  bool any() const noexcept { return q_violations > 0 || v_violations > 0; }
};

/// Counts (t, h, s, a) with Qbar < Q* - 1e-9 and (t, h, s) with Vbar < V* - 1e-9.
/// Throws std::invalid_argument on a shape mismatch.
OptimismReport check_optimism(const OptimismTrace& trace, const ValueTable& optimal);

/// Runs UCBMQ for `episodes` episodes and snapshots its bounds before the
/// first episode and after every update.
OptimismTrace record_ucbmq_trace(const TabularMDP& mdp, std::int64_t episodes, double delta,
                                 BonusMode mode, std::uint64_t seed);

/// Sum_{t=0..T} u_{t+1} / max(U_t, 1) <= 4 log(U_{T+1} + 1), plus the
/// 8 log(T + 1) corollary when T + 1 >= 2. `u` holds u_1..u_{T+1}.
/// Throws std::domain_error when an entry leaves [0, 1].
bool check_count_lemma(std::span<const double> u);

/// Left side of the count lemma.
double count_lemma_lhs(std::span<const double> u);

/// Rows of the cumulative weights sum to 1 (1e-12) once visited, and
/// sum_{k=l..t} flag[k+1] teta[k][l] <= (1 + 1/H) flag[l].
/// `flags` holds episodes 1..T.
bool check_weight_lemma(std::span<const int> flags, int horizon);

struct TotalVarianceReport {
  double recursion;       // Vvar[1][s1]
  double occupancy_sum;   // sum_h sum_{s,a} d[h][s][a] Var_{p_h}(V[h+1])(s, a)
  double enumerated;      // exact variance of the return over all trajectories
  bool passed;
};

/// Compares the variance recursion with trajectory enumeration (1e-9).
/// Throws InstanceTooLarge above the enumeration guard.
TotalVarianceReport check_total_variance(const TabularMDP& mdp, const DeterministicPolicy& policy);

/// Var_p(f) for a distribution p.
double distribution_variance(std::span<const double> p, std::span<const double> f);

struct VarianceSwitchReport {
  double var_f;
  double var_g;
  double var_f_squared;
  double mean_abs_gap;  // p|f - g|
  bool first_holds;     // Var(f) <= 2 Var(g) + 2 b p|f - g|
  bool second_holds;    // Var(f^2) <= 4 b^2 Var(f)
};

/// f, g must take values in [0, b]; throws std::domain_error otherwise.
VarianceSwitchReport check_variance_switch(std::span<const double> p, std::span<const double> f,
                                           std::span<const double> g, double bound);

/// One visit of (h, s, a) as seen by the Q update: the pre-episode target
/// Vbar_{h+1}(s') and bias value V_{h,s,a}(s').
struct VisitRecord {
  double reward;
  double target;
  double bias_at_next;
};

using PairKey = std::tuple<int, int, int>;

/// Appends, for every step of `trajectory`, the quantities the Q update
/// reads from `before` (the state prior to applying the episode).
void record_visits(const UcbmqState& before, const Trajectory& trajectory,
                   std::map<PairKey, std::vector<VisitRecord>>& history);

/// Batch form Q = r + (1/n) sum_k [y_k + gbar_k (y_k - b_k)], with
/// gbar_k = H (k - 1)/(k + H).
double unfolded_q(std::span<const VisitRecord> visits, int horizon);

/// Mean of squares minus squared mean, computed two-pass.
double batch_empirical_variance(std::span<const VisitRecord> visits);

/// Checks the almost-sure structure of a UCBMQ run at every episode
/// boundary: Vbar non-increasing and in [0, H], V_{h,s,a} >= Vbar_{h+1}
/// (1e-12 slack) and correction sums nonnegative and nondecreasing.
///
/// Bias rows only change on visited pairs and Vbar only decreases, so the
/// per-episode dominance check covers visited rows; full_sweep() re-checks
/// every row.
class UcbmqInvariantMonitor {
 public:
  explicit UcbmqInvariantMonitor(const UcbmqState& initial);

  void observe(const UcbmqState& state);
  void full_sweep(const UcbmqState& state);

  bool ok() const noexcept { return failures_.empty(); }
  const std::vector<std::string>& failures() const noexcept { return failures_; }
  std::int64_t episodes_checked() const noexcept { return episodes_; }

 private:
  void fail(std::string message);

  std::vector<double> prev_vbar_;
  std::vector<double> prev_correction_;
  std::vector<std::int64_t> prev_counts_;
  std::int64_t episodes_ = 0;
  std::vector<std::string> failures_;
};

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// The invariant suite behind the `check` command.
std::vector<CheckResult> run_check_suite();

}  // namespace ucbmq
