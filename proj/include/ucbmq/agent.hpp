#pragma once

#include <string_view>

#include "ucbmq/mdp.hpp"

namespace ucbmq {

/// Episodic learner driven by the experiment harness.
///
/// Per episode the harness calls begin_episode() once, act() at every step
/// while sampling, then observe() with the finished trajectory.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string_view name() const = 0;

  /// Policy this episode is evaluated under (greedy on the optimistic Q
  /// table as it stands before the episode).
  virtual DeterministicPolicy begin_episode() = 0;

  /// Action at step h in state s. UCBVI-greedy refreshes its tables here.
  virtual int act(int h, int s) = 0;

  virtual void observe(const Trajectory& trajectory) = 0;
};

/// Throws std::invalid_argument unless the trajectory has one step per
/// h = 1..H, in order, with in-range states and actions.
void validate_trajectory(const Trajectory& trajectory, int num_states, int num_actions,
                         int horizon);

}  // namespace ucbmq
