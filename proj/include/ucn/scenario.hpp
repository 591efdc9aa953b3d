// Scenario bundle (grid + channel + users + reward knobs + fleet) and the
// joint-move environment step shared by both trainers.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ucn/association.hpp"
#include "ucn/grid.hpp"
#include "ucn/radio.hpp"
#include "ucn/rewards.hpp"

namespace ucn {

struct RewardParams {
  double d_p = 0.25;
  double f_penalty = 2.0;
  // Use the own-connectivity first term instead of the fleet average in the
  // dynamic-fleet reward (sensitivity knob; fleet average is the default).
  bool ducm2_own_connectivity = false;

  bool operator==(const RewardParams&) const = default;
};

struct Scenario {
  GridSpec grid;
  ChannelParams channel;
  UserLayout users;
  RewardParams reward;
  int n_uavs = 0;
  std::vector<std::pair<int, int>> initial_xy;  // grid indices, per UAV id

  void validate() const {
    grid.validate();
    channel.validate();
    users.validate();
    if (n_uavs < 1) throw std::invalid_argument("Scenario: n_uavs must be >= 1");
    if (static_cast<int>(initial_xy.size()) != n_uavs)
      throw std::invalid_argument(
          "Scenario: initial_xy must have one entry per UAV");
    for (const auto& [x, y] : initial_xy)
      if (!grid.in_bounds(x, y))
        throw std::invalid_argument("Scenario: initial position out of bounds " +
                                    std::to_string(x) + "," + std::to_string(y));
  }

  std::vector<UavState> initial_uavs() const {
    std::vector<UavState> v;
    v.reserve(static_cast<std::size_t>(n_uavs));
    for (int i = 0; i < n_uavs; ++i)
      v.push_back(UavState{i, initial_xy[static_cast<std::size_t>(i)].first,
                           initial_xy[static_cast<std::size_t>(i)].second, true});
    return v;
  }
};

inline std::vector<Vec2> positions_m(const std::vector<UavState>& uavs,
                                     const GridSpec& grid) {
  std::vector<Vec2> p;
  p.reserve(uavs.size());
  for (const auto& u : uavs) p.push_back(grid.to_meters(u.x_idx, u.y_idx));
  return p;
}

inline std::vector<std::uint8_t> alive_mask(const std::vector<UavState>& uavs) {
  std::vector<std::uint8_t> m;
  m.reserve(uavs.size());
  for (const auto& u : uavs) m.push_back(u.alive ? 1 : 0);
  return m;
}

// Applies one action per UAV simultaneously (dead UAVs ignore theirs).
// Returns per-UAV flags for moves clamped at the boundary.
inline std::vector<std::uint8_t> apply_joint(std::vector<UavState>& uavs,
                                             const std::vector<int>& actions,
                                             const GridSpec& grid) {
  if (actions.size() != uavs.size())
    throw std::invalid_argument("apply_joint: one action per UAV required");
  std::vector<std::uint8_t> oob(uavs.size(), 0);
  for (std::size_t i = 0; i < uavs.size(); ++i) {
    if (!uavs[i].alive) continue;
    const MoveResult mr = apply_action(uavs[i], actions[i], grid);
    uavs[i] = mr.state;
    oob[i] = mr.out_of_bound ? 1 : 0;
  }
  return oob;
}

// Association over the current fleet against the user set active at time t.
inline AssociationResult assoc_at(const Scenario& sc,
                                  const std::vector<UavState>& uavs, int t) {
  return associate(positions_m(uavs, sc.grid), alive_mask(uavs),
                   sc.users.active(t), sc.channel);
}

inline RewardContext make_reward_context(const Scenario& sc,
                                         const std::vector<UavState>& uavs,
                                         const std::vector<std::uint8_t>& oob,
                                         const AssociationResult& assoc,
                                         int n_users) {
  RewardContext ctx;
  ctx.per_uav_connected = assoc.connected_per_uav;
  ctx.uav_pos = positions_m(uavs, sc.grid);
  ctx.alive = alive_mask(uavs);
  ctx.out_of_bound = oob;
  ctx.n_users = n_users;
  ctx.d_p = sc.reward.d_p;
  ctx.coverage_radius = sc.channel.coverage_radius();
  ctx.f_penalty = sc.reward.f_penalty;
  return ctx;
}

}  // namespace ucn
