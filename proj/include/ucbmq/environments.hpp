#pragma once

#include <cstdint>
#include <vector>

#include "ucbmq/mdp.hpp"

namespace ucbmq {

/// 1-based grid coordinate.
struct GridCell {
  int row;
  int col;
};

struct GridWorldSpec {
  int rows = 10;
  int cols = 5;
  double noise = 0.15;
  int horizon = 100;
  GridCell start{1, 1};
  GridCell reward_cell{10, 5};
};

enum class GridAction : int { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

inline constexpr int kGridActions = 4;

/// State index of a 1-based cell, row-major.
inline int grid_state(const GridWorldSpec& spec, GridCell cell) {
  return (cell.row - 1) * spec.cols + (cell.col - 1);
}

/// In-grid neighbors of a cell (2 at corners, 3 on edges, 4 inside).
std::vector<int> grid_neighbors(const GridWorldSpec& spec, int state);

/// Intended moves succeed with probability 1 - noise (blocked moves stay
/// put); the noise mass is spread uniformly over the in-grid neighbors.
/// The reward cell pays 1 for every action and is not absorbing.
TabularMDP build_gridworld(const GridWorldSpec& spec);

/// Deterministic line: action 1 advances, action 0 stays; the last state
/// pays 1 for every action.
TabularMDP build_chain(int length, int horizon);

/// Rows are normalized positive random weights; rewards are uniform on [0, 1].
TabularMDP build_random_mdp(int num_states, int num_actions, int horizon, std::uint64_t seed);

}  // namespace ucbmq
