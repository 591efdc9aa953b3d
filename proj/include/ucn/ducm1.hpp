// Fixed-fleet multi-agent deep Q-learning: every UAV trains its own network
// under one of four information-exchange levels, all agents move
// simultaneously, and association runs once per step on the joint positions.
// Includes a greedy evaluation rollout and a tabular Q-learning baseline.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ucn/agent.hpp"
#include "ucn/scenario.hpp"

namespace ucn {

struct Ducm1Config {
  int level = 3;
  int n_episodes = 1000;
  int steps = 100;  // time slots per episode
  double epsilon = 0.1;
  double gamma = 0.95;
  double lr = 2.5e-4;
  int batch = 512;
  int replay_capacity = 100000;
  int target_update = 10;
  double clip_norm = 1.0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::vector<int> hidden = {400, 400};
  bool include_time_state = false;
  std::uint64_t seed = 1;

  void validate() const {
    if (level < 1 || level > 4)
      throw std::invalid_argument("Ducm1Config: level must be 1..4");
    if (n_episodes < 1 || n_episodes > 1000)
      throw std::invalid_argument("Ducm1Config: n_episodes must be 1..1000");
    if (steps < 1) throw std::invalid_argument("Ducm1Config: steps must be >= 1");
    if (epsilon < 0.0 || epsilon > 1.0)
      throw std::invalid_argument("Ducm1Config: epsilon must be in [0,1]");
    if (gamma < 0.0 || gamma >= 1.0)
      throw std::invalid_argument("Ducm1Config: gamma must be in [0,1)");
    if (lr <= 0.0) throw std::invalid_argument("Ducm1Config: lr must be > 0");
    if (batch < 1) throw std::invalid_argument("Ducm1Config: batch must be >= 1");
    if (replay_capacity < batch)
      throw std::invalid_argument("Ducm1Config: replay capacity below batch");
    if (target_update < 1)
      throw std::invalid_argument("Ducm1Config: target_update must be >= 1");
    if (hidden.empty())
      throw std::invalid_argument("Ducm1Config: at least one hidden layer");
    for (int h : hidden)
      if (h < 1) throw std::invalid_argument("Ducm1Config: hidden width >= 1");
  }
};

inline int state_dim(int level, int n_uavs, bool include_time) {
  return (level <= 3 ? 2 : 2 * n_uavs) + (include_time ? 1 : 0);
}

// Levels 1-3 observe only the agent's own position; level 4 observes every
// UAV's position in ascending id order. Features are scaled to [0,1].
inline Eigen::VectorXd build_state(int level, int agent_id,
                                   const std::vector<UavState>& uavs, int t,
                                   const GridSpec& grid, int steps,
                                   bool include_time) {
  if (level < 1 || level > 4)
    throw std::invalid_argument("build_state: level must be 1..4");
  if (!uavs[static_cast<std::size_t>(agent_id)].alive)
    throw std::invalid_argument("build_state: agent not alive");
  const double span = grid.m - 1;
  Eigen::VectorXd s(state_dim(level, static_cast<int>(uavs.size()), include_time));
  int k = 0;
  if (level <= 3) {
    const auto& u = uavs[static_cast<std::size_t>(agent_id)];
    s(k++) = u.x_idx / span;
    s(k++) = u.y_idx / span;
  } else {
    for (const auto& u : uavs) {
      s(k++) = u.x_idx / span;
      s(k++) = u.y_idx / span;
    }
  }
  if (include_time) s(k++) = static_cast<double>(t) / steps;
  return s;
}

struct Rollout {
  // Index 0 holds the initial situation; entries 1..T follow each joint move.
  std::vector<std::vector<UavState>> positions;
  std::vector<int> connected;
};

class Ducm1Trainer {
 public:
  Ducm1Trainer(Scenario sc, Ducm1Config cfg)
      : sc_(std::move(sc)), cfg_(std::move(cfg)) {
    sc_.validate();
    cfg_.validate();
    const Rng master(cfg_.seed);
    std::vector<int> dims;
    dims.push_back(state_dim(cfg_.level, sc_.n_uavs, cfg_.include_time_state));
    dims.insert(dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    dims.push_back(kQOutputs);
    agents_.reserve(static_cast<std::size_t>(sc_.n_uavs));
    for (int i = 0; i < sc_.n_uavs; ++i)
      agents_.push_back(make_agent(dims, cfg_.optimizer, cfg_.lr,
                                   static_cast<std::size_t>(cfg_.replay_capacity),
                                   master, i));
  }

  EpisodeMetrics run_episode() {
    const int n = sc_.n_uavs;
    const int T = cfg_.steps;
    std::vector<UavState> uavs = sc_.initial_uavs();
    long long acc = 0;
    double reward_sum = 0.0, loss_sum = 0.0;
    long reward_n = 0, loss_n = 0;

    std::vector<Eigen::VectorXd> s(static_cast<std::size_t>(n));
    std::vector<int> actions(static_cast<std::size_t>(n));
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < n; ++i) {
        s[static_cast<std::size_t>(i)] = build_state(
            cfg_.level, i, uavs, t, sc_.grid, T, cfg_.include_time_state);
        actions[static_cast<std::size_t>(i)] = epsilon_greedy(
            agents_[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i)],
            cfg_.epsilon);
      }
      const auto oob = apply_joint(uavs, actions, sc_.grid);
      const auto& users = sc_.users.active(t + 1);
      const AssociationResult assoc =
          associate(positions_m(uavs, sc_.grid), alive_mask(uavs), users,
                    sc_.channel);
      acc += assoc.connected_total;
      const RewardContext ctx = make_reward_context(
          sc_, uavs, oob, assoc, static_cast<int>(users.size()));
      const bool terminal = (t + 1 == T);
      for (int i = 0; i < n; ++i) {
        const double r = reward_for_level(cfg_.level, i, ctx);
        reward_sum += r;
        ++reward_n;
        Eigen::VectorXd sn = build_state(cfg_.level, i, uavs, t + 1, sc_.grid,
                                         T, cfg_.include_time_state);
        agents_[static_cast<std::size_t>(i)].replay.push(Experience{
            s[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
            std::move(sn), r, terminal});
      }
      for (int i = 0; i < n; ++i) {
        Agent& a = agents_[static_cast<std::size_t>(i)];
        if (a.replay.size() < static_cast<std::size_t>(cfg_.batch)) continue;
        const auto batch = sample_batch(a.replay, static_cast<std::size_t>(cfg_.batch),
                                        a.sample);
        const TrainStats st =
            train_step(a.net, a.target, batch, a.opt, cfg_.gamma, cfg_.clip_norm);
        loss_sum += st.loss;
        ++loss_n;
      }
      if ((t + 1) % cfg_.target_update == 0)
        for (Agent& a : agents_) hard_update(a.target, a.net);
    }
    ++episodes_done_;
    return EpisodeMetrics{episodes_done_, "single", acc,
                          reward_n ? reward_sum / reward_n : 0.0,
                          loss_n ? loss_sum / loss_n : 0.0};
  }

  void train(const std::function<void(const EpisodeMetrics&)>& on_episode) {
    while (episodes_done_ < cfg_.n_episodes) {
      const EpisodeMetrics m = run_episode();
      if (on_episode) on_episode(m);
    }
  }

  const Scenario& scenario() const { return sc_; }
  const Ducm1Config& config() const { return cfg_; }
  std::vector<Agent>& agents() { return agents_; }
  const std::vector<Agent>& agents() const { return agents_; }
  int episodes_done() const { return episodes_done_; }
  void set_episodes_done(int e) { episodes_done_ = e; }

 private:
  Scenario sc_;
  Ducm1Config cfg_;
  std::vector<Agent> agents_;
  int episodes_done_ = 0;
};

// Deterministic epsilon=0 rollout of the given policies from start_xy.
inline Rollout greedy_rollout(const std::vector<Agent>& agents,
                              const Scenario& sc, const Ducm1Config& cfg,
                              const std::vector<std::pair<int, int>>& start_xy,
                              int steps) {
  if (agents.size() != static_cast<std::size_t>(sc.n_uavs))
    throw std::invalid_argument("greedy_rollout: one policy per UAV required");
  if (start_xy.size() != static_cast<std::size_t>(sc.n_uavs))
    throw std::invalid_argument("greedy_rollout: one start per UAV required");
  std::vector<UavState> uavs;
  uavs.reserve(agents.size());
  for (int i = 0; i < sc.n_uavs; ++i) {
    const auto& [x, y] = start_xy[static_cast<std::size_t>(i)];
    if (!sc.grid.in_bounds(x, y))
      throw std::invalid_argument("greedy_rollout: start out of bounds");
    uavs.push_back(UavState{i, x, y, true});
  }
  Rollout out;
  out.positions.push_back(uavs);
  out.connected.push_back(assoc_at(sc, uavs, 0).connected_total);
  std::vector<int> actions(static_cast<std::size_t>(sc.n_uavs));
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < sc.n_uavs; ++i) {
      const Eigen::VectorXd s = build_state(cfg.level, i, uavs, t, sc.grid,
                                            cfg.steps, cfg.include_time_state);
      actions[static_cast<std::size_t>(i)] =
          agents[static_cast<std::size_t>(i)].net.argmax_action(s);
    }
    apply_joint(uavs, actions, sc.grid);
    out.positions.push_back(uavs);
    out.connected.push_back(assoc_at(sc, uavs, t + 1).connected_total);
  }
  return out;
}

inline Rollout greedy_rollout(const Ducm1Trainer& tr,
                              const std::vector<std::pair<int, int>>& start_xy,
                              int steps) {
  return greedy_rollout(tr.agents(), tr.scenario(), tr.config(), start_xy, steps);
}

// Tabular Q-learning baseline over the discrete (x, y, t) state space.
// Shares the environment loop and the level-3 reward.
class TabularQl {
 public:
  TabularQl(Scenario sc, Ducm1Config cfg, double alpha = 0.1)
      : sc_(std::move(sc)), cfg_(std::move(cfg)), alpha_(alpha) {
    sc_.validate();
    cfg_.validate();
    if (cfg_.level != 3)
      throw std::invalid_argument("TabularQl: level 3 only");
    if (alpha_ <= 0.0 || alpha_ > 1.0)
      throw std::invalid_argument("TabularQl: alpha must be in (0,1]");
    const Rng master(cfg_.seed);
    const int n_states = sc_.grid.m * sc_.grid.m * cfg_.steps;
    q_.assign(static_cast<std::size_t>(sc_.n_uavs),
              Eigen::MatrixXd::Zero(kNumActions, n_states));
    for (int i = 0; i < sc_.n_uavs; ++i)
      explore_.push_back(master.derive("agent-explore",
                                       static_cast<std::uint64_t>(i)));
  }

  int state_index(int x, int y, int t) const {
    return (x * sc_.grid.m + y) * cfg_.steps + t;
  }

  EpisodeMetrics run_episode() {
    const int n = sc_.n_uavs;
    const int T = cfg_.steps;
    std::vector<UavState> uavs = sc_.initial_uavs();
    long long acc = 0;
    double reward_sum = 0.0;
    long reward_n = 0;
    std::vector<int> sidx(static_cast<std::size_t>(n));
    std::vector<int> actions(static_cast<std::size_t>(n));
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < n; ++i) {
        const auto& u = uavs[static_cast<std::size_t>(i)];
        sidx[static_cast<std::size_t>(i)] = state_index(u.x_idx, u.y_idx, t);
        actions[static_cast<std::size_t>(i)] =
            select(i, sidx[static_cast<std::size_t>(i)]);
      }
      const auto oob = apply_joint(uavs, actions, sc_.grid);
      const auto& users = sc_.users.active(t + 1);
      const AssociationResult assoc =
          associate(positions_m(uavs, sc_.grid), alive_mask(uavs), users,
                    sc_.channel);
      acc += assoc.connected_total;
      const RewardContext ctx = make_reward_context(
          sc_, uavs, oob, assoc, static_cast<int>(users.size()));
      const bool terminal = (t + 1 == T);
      for (int i = 0; i < n; ++i) {
        const double r = reward_level3(i, ctx);
        reward_sum += r;
        ++reward_n;
        Eigen::MatrixXd& q = q_[static_cast<std::size_t>(i)];
        double target = r;
        if (!terminal) {
          const auto& u = uavs[static_cast<std::size_t>(i)];
          target += cfg_.gamma *
                    q.col(state_index(u.x_idx, u.y_idx, t + 1)).maxCoeff();
        }
        double& cell = q(actions[static_cast<std::size_t>(i)],
                         sidx[static_cast<std::size_t>(i)]);
        cell += alpha_ * (target - cell);
      }
    }
    ++episodes_done_;
    return EpisodeMetrics{episodes_done_, "tabular", acc,
                          reward_n ? reward_sum / reward_n : 0.0, 0.0};
  }

  Rollout greedy_rollout(const std::vector<std::pair<int, int>>& start_xy,
                         int steps) const {
    std::vector<UavState> uavs;
    for (int i = 0; i < sc_.n_uavs; ++i)
      uavs.push_back(UavState{i, start_xy[static_cast<std::size_t>(i)].first,
                              start_xy[static_cast<std::size_t>(i)].second,
                              true});
    Rollout out;
    out.positions.push_back(uavs);
    out.connected.push_back(assoc_at(sc_, uavs, 0).connected_total);
    std::vector<int> actions(static_cast<std::size_t>(sc_.n_uavs));
    for (int t = 0; t < steps; ++t) {
      for (int i = 0; i < sc_.n_uavs; ++i) {
        const auto& u = uavs[static_cast<std::size_t>(i)];
        const auto col =
            q_[static_cast<std::size_t>(i)].col(
                state_index(u.x_idx, u.y_idx, std::min(t, cfg_.steps - 1)));
        int best = 0;
        for (int a = 1; a < kNumActions; ++a)
          if (col(a) > col(best)) best = a;
        actions[static_cast<std::size_t>(i)] = best;
      }
      apply_joint(uavs, actions, sc_.grid);
      out.positions.push_back(uavs);
      out.connected.push_back(assoc_at(sc_, uavs, t + 1).connected_total);
    }
    return out;
  }

  const Eigen::MatrixXd& table(int agent) const {
    return q_[static_cast<std::size_t>(agent)];
  }
  int episodes_done() const { return episodes_done_; }

 private:
  int select(int i, int sidx) {
    Rng& rng = explore_[static_cast<std::size_t>(i)];
    if (rng.uniform() < cfg_.epsilon) return rng.uniform_int(kNumActions);
    const auto col = q_[static_cast<std::size_t>(i)].col(sidx);
    int best = 0;
    for (int a = 1; a < kNumActions; ++a)
      if (col(a) > col(best)) best = a;
    return best;
  }

  Scenario sc_;
  Ducm1Config cfg_;
  double alpha_;
  std::vector<Eigen::MatrixXd> q_;  // kNumActions x (M*M*T) per agent
  std::vector<Rng> explore_;
  int episodes_done_ = 0;
};

}  // namespace ucn
