#include "ucbmq/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ucbmq {

namespace {

bool in_grid(const GridWorldSpec& spec, GridCell cell) {
  return cell.row >= 1 && cell.row <= spec.rows && cell.col >= 1 && cell.col <= spec.cols;
}

GridCell cell_of(const GridWorldSpec& spec, int state) {
  return {state / spec.cols + 1, state % spec.cols + 1};
}

GridCell shifted(GridCell cell, int action) {
  switch (static_cast<GridAction>(action)) {
    case GridAction::kLeft: return {cell.row, cell.col - 1};
    case GridAction::kRight: return {cell.row, cell.col + 1};
    case GridAction::kUp: return {cell.row - 1, cell.col};
    case GridAction::kDown: return {cell.row + 1, cell.col};
  }
  return cell;
}

void validate(const GridWorldSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("gridworld: empty grid");
  if (spec.horizon < 1) throw std::invalid_argument("gridworld: horizon must be positive");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) {
    throw std::invalid_argument("gridworld: noise must lie in [0, 1]");
  }
  if (!in_grid(spec, spec.start)) throw std::invalid_argument("gridworld: start cell out of bounds");
  if (!in_grid(spec, spec.reward_cell)) {
    throw std::invalid_argument("gridworld: reward cell out of bounds");
  }
}

}  // namespace

std::vector<int> grid_neighbors(const GridWorldSpec& spec, int state) {
  std::vector<int> out;
  const GridCell cell = cell_of(spec, state);
  for (int a = 0; a < kGridActions; ++a) {
    const GridCell next = shifted(cell, a);
    if (in_grid(spec, next)) out.push_back(grid_state(spec, next));
  }
  return out;
}

TabularMDP build_gridworld(const GridWorldSpec& spec) {
  validate(spec);
  const int S = spec.rows * spec.cols;
  const int A = kGridActions;
  const int H = spec.horizon;
  const int goal = grid_state(spec, spec.reward_cell);

  // One stationary slice, replicated across steps.
  std::vector<double> slice(static_cast<std::size_t>(S) * A * S, 0.0);
  for (int s = 0; s < S; ++s) {
    const auto neighbors = grid_neighbors(spec, s);
    const GridCell cell = cell_of(spec, s);
    for (int a = 0; a < A; ++a) {
      double* row = slice.data() + (static_cast<std::size_t>(s) * A + a) * S;
      const GridCell target = shifted(cell, a);
      row[in_grid(spec, target) ? grid_state(spec, target) : s] += 1.0 - spec.noise;
      // A 1x1 grid has no neighbors; the noise mass then stays in place.
      if (neighbors.empty()) {
        row[s] += spec.noise;
      } else {
        const double share = spec.noise / static_cast<double>(neighbors.size());
        for (int n : neighbors) row[n] += share;
      }
    }
  }

  std::vector<double> transitions;
  transitions.reserve(slice.size() * H);
  std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 1; h <= H; ++h) {
    transitions.insert(transitions.end(), slice.begin(), slice.end());
    for (int a = 0; a < A; ++a) {
      rewards[(static_cast<std::size_t>(h - 1) * S + goal) * A + a] = 1.0;
    }
  }
  return TabularMDP(S, A, H, std::move(transitions), std::move(rewards),
                    grid_state(spec, spec.start));
}

TabularMDP build_chain(int length, int horizon) {
  if (length < 2) throw std::invalid_argument("chain: length must be at least 2");
  if (horizon < 1) throw std::invalid_argument("chain: horizon must be positive");
  const int S = length, A = 2, H = horizon;
  std::vector<double> transitions(static_cast<std::size_t>(H) * S * A * S, 0.0);
  std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      const std::size_t base = (static_cast<std::size_t>(h - 1) * S + s) * A;
      transitions[(base + 0) * S + s] = 1.0;
      transitions[(base + 1) * S + std::min(s + 1, S - 1)] = 1.0;
      if (s == S - 1) {
        rewards[base + 0] = 1.0;
        rewards[base + 1] = 1.0;
      }
    }
  }
  return TabularMDP(S, A, H, std::move(transitions), std::move(rewards), 0);
}

TabularMDP build_random_mdp(int num_states, int num_actions, int horizon, std::uint64_t seed) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("random mdp: S, A and H must be positive");
  }
  const int S = num_states, A = num_actions, H = horizon;
  RandomStream rng(seed);
  std::vector<double> transitions(static_cast<std::size_t>(H) * S * A * S);
  std::vector<double> rewards(static_cast<std::size_t>(H) * S * A);
  for (std::size_t pair = 0; pair < rewards.size(); ++pair) {
    double* row = transitions.data() + pair * S;
    double total = 0.0;
    for (int next = 0; next < S; ++next) {
      // Exponential weights give a flat Dirichlet after normalization.
      row[next] = -std::log1p(-rng.uniform()) + 1e-3;
      total += row[next];
    }
    for (int next = 0; next < S; ++next) row[next] /= total;
    rewards[pair] = rng.uniform();
  }
  return TabularMDP(S, A, H, std::move(transitions), std::move(rewards), 0);
}

}  // namespace ucbmq
