// Per-UAV learner: online and target Q-networks, optimizer, replay buffer,
// and the private random streams for exploration and batch sampling.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ucn/dqn.hpp"
#include "ucn/grid.hpp"
#include "ucn/mlp.hpp"
#include "ucn/replay.hpp"
#include "ucn/rng.hpp"

namespace ucn {

struct Agent {
  Mlp net;
  Mlp target;
  Optimizer opt;
  ReplayBuffer replay;
  Rng explore;
  Rng sample;
};

inline Agent make_agent(const std::vector<int>& dims, OptimizerKind opt_kind,
                        double lr, std::size_t replay_capacity,
                        const Rng& master, int agent_id) {
  const auto id = static_cast<std::uint64_t>(agent_id);
  Rng init = master.derive("agent-init", id);
  Agent a{Mlp::make(dims, init),
          Mlp{},
          Optimizer(opt_kind, lr),
          ReplayBuffer(replay_capacity),
          master.derive("agent-explore", id),
          master.derive("agent-sample", id)};
  a.target = a.net;
  return a;
}

// With probability epsilon a uniformly random action, otherwise the greedy
// one. The uniform draw is consumed even when epsilon is 0 so the stream
// advances identically across epsilon settings.
inline int epsilon_greedy(Agent& a, const Eigen::VectorXd& s, double epsilon) {
  if (a.explore.uniform() < epsilon)
    return a.explore.uniform_int(kNumActions);
  return a.net.argmax_action(s);
}

struct EpisodeMetrics {
  int episode = 0;
  std::string kind;  // "single" (fixed fleet), "odd"/"even", or "tabular"
  long long accumulated_connected = 0;
  double mean_reward = 0.0;
  double mean_loss = 0.0;
};

}  // namespace ucn
