// Reward functions for the four information-exchange levels and the
// dynamic-fleet variant, including the pairwise distance penalty.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ucn/grid.hpp"

namespace ucn {

struct RewardContext {
  std::vector<int> per_uav_connected;
  std::vector<Vec2> uav_pos;              // meters
  std::vector<std::uint8_t> alive;
  std::vector<std::uint8_t> out_of_bound;
  int n_users = 0;
  double d_p = 0.25;             // weighting factor for the distance penalty
  double coverage_radius = 0.0;  // r
  double f_penalty = 2.0;        // out-of-bound penalty value

  int alive_count() const {
    return static_cast<int>(std::count(alive.begin(), alive.end(),
                                       std::uint8_t{1}));
  }
};

inline double out_penalty(int i, const RewardContext& ctx) {
  return ctx.out_of_bound[static_cast<std::size_t>(i)] ? ctx.f_penalty : 0.0;
}

// max(0, (1 - d_ij / 2r) * p_max), p_max = d_p * |I_t| / |U_t|.
// Zero once UAVs are at least 2r apart.
inline double distance_penalty(int i, int j, const RewardContext& ctx) {
  if (i == j) throw std::invalid_argument("distance_penalty: i == j");
  const double p_max =
      ctx.d_p * static_cast<double>(ctx.alive_count()) / ctx.n_users;
  const double d = dist(ctx.uav_pos[static_cast<std::size_t>(i)],
                        ctx.uav_pos[static_cast<std::size_t>(j)]);
  return std::max(0.0, (1.0 - d / (2.0 * ctx.coverage_radius)) * p_max);
}

inline double total_distance_penalty(int i, const RewardContext& ctx) {
  double sum = 0.0;
  for (int j = 0; j < static_cast<int>(ctx.alive.size()); ++j) {
    if (j == i || !ctx.alive[static_cast<std::size_t>(j)]) continue;
    sum += distance_penalty(i, j, ctx);
  }
  return sum;
}

inline double mean_connected(const RewardContext& ctx) {
  double total = 0.0;
  for (int j = 0; j < static_cast<int>(ctx.alive.size()); ++j)
    if (ctx.alive[static_cast<std::size_t>(j)])
      total += ctx.per_uav_connected[static_cast<std::size_t>(j)];
  return total / ctx.alive_count();
}

// Level 1: own connectivity minus the out-of-bound penalty.
inline double reward_level1(int i, const RewardContext& ctx) {
  return ctx.per_uav_connected[static_cast<std::size_t>(i)] -
         out_penalty(i, ctx);
}

// Level 2: fleet-average connectivity; penalties stay individual.
inline double reward_level2(int i, const RewardContext& ctx) {
  return mean_connected(ctx) - out_penalty(i, ctx);
}

// Level 3: own connectivity minus proximity penalties minus the
// out-of-bound penalty.
inline double reward_level3(int i, const RewardContext& ctx) {
  return ctx.per_uav_connected[static_cast<std::size_t>(i)] -
         total_distance_penalty(i, ctx) - out_penalty(i, ctx);
}

// Dynamic-fleet reward, evaluated within one environment copy: the
// fleet-average connectivity term combined with the level-3 penalties.
// own_connectivity_term switches the first term to the agent's own count
// for sensitivity runs.
inline double reward_ducm2(int i, const RewardContext& ctx,
                           bool own_connectivity_term = false) {
  const double base =
      own_connectivity_term
          ? static_cast<double>(
                ctx.per_uav_connected[static_cast<std::size_t>(i)])
          : mean_connected(ctx);
  return base - total_distance_penalty(i, ctx) - out_penalty(i, ctx);
}

// Levels 1-3 use their own designs; level 4 reuses the level-2 reward (the
// level-4 distinction lives in the state construction).
inline double reward_for_level(int level, int i, const RewardContext& ctx) {
  switch (level) {
    case 1: return reward_level1(i, ctx);
    case 2: return reward_level2(i, ctx);
    case 3: return reward_level3(i, ctx);
    case 4: return reward_level2(i, ctx);
    default:
      throw std::invalid_argument("reward_for_level: level must be 1..4");
  }
}

}  // namespace ucn
