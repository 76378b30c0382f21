#pragma once

#include <cstdint>

namespace ucbmq {

/// Exploration bonus shared by every agent in the grid-world comparison:
/// H - h + 1 when unvisited, else min(sqrt(1/n) + (H - h + 1)/n, H - h + 1).
double simplified_bonus(std::int64_t n, int h, int horizon);

}  // namespace ucbmq
