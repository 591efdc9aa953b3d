// Dynamic-fleet training: heterogeneous episodes alternate a full-fleet run
// with a random quit sequence, a quitting UAV migrates into a complementary
// second environment copy, and every agent folds both copies' experiences
// into one buffer. The on-off fleet vector enters each state as a single
// normalized scalar code.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ucn/agent.hpp"
#include "ucn/scenario.hpp"

namespace ucn {

// Normalized decimal expansion of the on-off vector: bit i carries weight
// 2^i, the denominator is 2^|bits|, so the value stays in [0, 1).
inline double live_code(const std::vector<std::uint8_t>& bits) {
  double v = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) v += std::ldexp(1.0, static_cast<int>(i));
  return v / std::ldexp(1.0, static_cast<int>(bits.size()));
}

inline std::vector<std::uint8_t> complement_bits(
    const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 0 : 1;
  return out;
}

inline double complement_code(const std::vector<std::uint8_t>& bits) {
  return live_code(complement_bits(bits));
}

// State is always 4-dimensional: own position, fleet code, time.
inline Eigen::VectorXd build_state2(const UavState& u, const GridSpec& grid,
                                    double code, int t, int steps) {
  const double span = grid.m - 1;
  Eigen::VectorXd s(4);
  s << u.x_idx / span, u.y_idx / span, code, static_cast<double>(t) / steps;
  return s;
}

// 0 = first copy, 1 = second copy.
inline int copy_of_agent(int id, const std::vector<UavState>& copy1,
                         const std::vector<UavState>& copy2) {
  const bool a = copy1[static_cast<std::size_t>(id)].alive;
  const bool b = copy2[static_cast<std::size_t>(id)].alive;
  if (a == b)
    throw std::invalid_argument(
        "copy_of_agent: agent must be alive in exactly one copy");
  return a ? 0 : 1;
}

inline Eigen::VectorXd build_state2(int id, const std::vector<UavState>& copy1,
                                    const std::vector<UavState>& copy2,
                                    const GridSpec& grid, int t, int steps) {
  const int c = copy_of_agent(id, copy1, copy2);
  const std::vector<UavState>& copy = c == 0 ? copy1 : copy2;
  return build_state2(copy[static_cast<std::size_t>(id)], grid,
                      live_code(alive_mask(copy)), t, steps);
}

struct EpisodePlan {
  bool full_set = true;
  std::vector<int> quit_order;  // permutation of all ids; the first n-1 quit
  int quit_interval = 0;
};

// Odd episode indices keep the full fleet (no randomness consumed); even
// indices draw a uniform quit permutation with quits every quit_interval
// steps.
inline EpisodePlan make_episode_plan(int episode_index, Rng& rng, int n_max,
                                     int quit_interval) {
  if (episode_index < 1)
    throw std::invalid_argument("make_episode_plan: episode_index >= 1");
  EpisodePlan p;
  p.quit_interval = quit_interval;
  if (episode_index % 2 == 1) return p;
  p.full_set = false;
  p.quit_order = rng.permutation(n_max);
  return p;
}

struct Ducm2Config {
  int n_episodes = 1000;
  int steps = 150;
  int quit_interval = 20;  // 2(M-1) for the default grid
  double epsilon = 0.1;
  double gamma = 0.95;
  double lr = 3.5e-4;
  int batch = 512;
  int replay_capacity = 100000;
  int target_update = 10;
  double clip_norm = 1.0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::vector<int> hidden = {400, 400, 400};
  std::pair<int, int> entry_xy = {0, 0};  // where joining UAVs appear
  std::uint64_t seed = 1;

  void validate(int n_uavs, const GridSpec& grid) const {
    if (n_episodes < 1 || n_episodes > 1000)
      throw std::invalid_argument("Ducm2Config: n_episodes must be 1..1000");
    if (steps < 1) throw std::invalid_argument("Ducm2Config: steps must be >= 1");
    if (quit_interval < 1)
      throw std::invalid_argument("Ducm2Config: quit_interval must be >= 1");
    if ((n_uavs - 1) * quit_interval >= steps)
      throw std::invalid_argument(
          "Ducm2Config: quit schedule must fit inside the episode");
    if (epsilon < 0.0 || epsilon > 1.0)
      throw std::invalid_argument("Ducm2Config: epsilon must be in [0,1]");
    if (gamma < 0.0 || gamma >= 1.0)
      throw std::invalid_argument("Ducm2Config: gamma must be in [0,1)");
    if (lr <= 0.0) throw std::invalid_argument("Ducm2Config: lr must be > 0");
    if (batch < 1) throw std::invalid_argument("Ducm2Config: batch must be >= 1");
    if (replay_capacity < batch)
      throw std::invalid_argument("Ducm2Config: replay capacity below batch");
    if (target_update < 1)
      throw std::invalid_argument("Ducm2Config: target_update must be >= 1");
    if (hidden.empty())
      throw std::invalid_argument("Ducm2Config: at least one hidden layer");
    for (int h : hidden)
      if (h < 1) throw std::invalid_argument("Ducm2Config: hidden width >= 1");
    if (!grid.in_bounds(entry_xy.first, entry_xy.second))
      throw std::invalid_argument("Ducm2Config: entry position out of bounds");
  }
};

class Ducm2Trainer {
 public:
  // sc is the first copy's world; the second copy shares everything but the
  // user sample.
  Ducm2Trainer(Scenario sc, UserLayout users2, Ducm2Config cfg)
      : sc_(std::move(sc)), cfg_(std::move(cfg)), plan_rng_(0) {
    sc_.validate();
    cfg_.validate(sc_.n_uavs, sc_.grid);
    users2.validate();
    sc2_ = sc_;
    sc2_.users = std::move(users2);
    const Rng master(cfg_.seed);
    plan_rng_ = master.derive("plan");
    const std::vector<int> dims = [&] {
      std::vector<int> d{4};
      d.insert(d.end(), cfg_.hidden.begin(), cfg_.hidden.end());
      d.push_back(kQOutputs);
      return d;
    }();
    for (int i = 0; i < sc_.n_uavs; ++i)
      agents_.push_back(make_agent(dims, cfg_.optimizer, cfg_.lr,
                                   static_cast<std::size_t>(cfg_.replay_capacity),
                                   master, i));
  }

  EpisodeMetrics run_episode() {
    const int n = sc_.n_uavs;
    const int T = cfg_.steps;
    const int episode = episodes_done_ + 1;
    const EpisodePlan plan =
        make_episode_plan(episode, plan_rng_, n, cfg_.quit_interval);

    std::vector<UavState> c1 = sc_.initial_uavs();
    std::vector<UavState> c2 = sc_.initial_uavs();
    for (auto& u : c2) u.alive = false;
    int next_quit = 0;

    long long acc = 0;
    double reward_sum = 0.0, loss_sum = 0.0;
    long reward_n = 0, loss_n = 0;

    std::vector<Eigen::VectorXd> s(static_cast<std::size_t>(n));
    std::vector<int> actions(static_cast<std::size_t>(n), kHover);
    std::vector<int> copy_of(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < T; ++t) {
      if (!plan.full_set && next_quit < n - 1 &&
          t == (next_quit + 1) * plan.quit_interval) {
        const int id = plan.quit_order[static_cast<std::size_t>(next_quit)];
        auto& from = c1[static_cast<std::size_t>(id)];
        auto& to = c2[static_cast<std::size_t>(id)];
        to = from;  // keeps the position at quit time
        from.alive = false;
        ++next_quit;
      }
      const double code1 = live_code(alive_mask(c1));
      const double code2 = live_code(alive_mask(c2));
      for (int i = 0; i < n; ++i) {
        const int c = copy_of_agent(i, c1, c2);
        copy_of[static_cast<std::size_t>(i)] = c;
        const auto& u = (c == 0 ? c1 : c2)[static_cast<std::size_t>(i)];
        s[static_cast<std::size_t>(i)] =
            build_state2(u, sc_.grid, c == 0 ? code1 : code2, t, T);
        actions[static_cast<std::size_t>(i)] = epsilon_greedy(
            agents_[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i)],
            cfg_.epsilon);
      }
      const auto oob1 = apply_joint(c1, actions, sc_.grid);
      const auto oob2 = apply_joint(c2, actions, sc_.grid);
      const auto& users1 = sc_.users.active(t + 1);
      const auto& users2 = sc2_.users.active(t + 1);
      const AssociationResult a1 = associate(
          positions_m(c1, sc_.grid), alive_mask(c1), users1, sc_.channel);
      const AssociationResult a2 = associate(
          positions_m(c2, sc_.grid), alive_mask(c2), users2, sc2_.channel);
      acc += a1.connected_total + a2.connected_total;
      const RewardContext ctx1 = make_reward_context(
          sc_, c1, oob1, a1, static_cast<int>(users1.size()));
      const RewardContext ctx2 = make_reward_context(
          sc2_, c2, oob2, a2, static_cast<int>(users2.size()));
      const bool terminal = (t + 1 == T);
      for (int i = 0; i < n; ++i) {
        const int c = copy_of[static_cast<std::size_t>(i)];
        const RewardContext& ctx = c == 0 ? ctx1 : ctx2;
        const double r =
            reward_ducm2(i, ctx, sc_.reward.ducm2_own_connectivity);
        reward_sum += r;
        ++reward_n;
        const auto& u = (c == 0 ? c1 : c2)[static_cast<std::size_t>(i)];
        Eigen::VectorXd sn =
            build_state2(u, sc_.grid, c == 0 ? code1 : code2, t + 1, T);
        agents_[static_cast<std::size_t>(i)].replay.push(Experience{
            s[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
            std::move(sn), r, terminal});
      }
      for (int i = 0; i < n; ++i) {
        Agent& a = agents_[static_cast<std::size_t>(i)];
        if (a.replay.size() < static_cast<std::size_t>(cfg_.batch)) continue;
        const auto batch = sample_batch(
            a.replay, static_cast<std::size_t>(cfg_.batch), a.sample);
        const TrainStats st =
            train_step(a.net, a.target, batch, a.opt, cfg_.gamma, cfg_.clip_norm);
        loss_sum += st.loss;
        ++loss_n;
      }
      if ((t + 1) % cfg_.target_update == 0)
        for (Agent& a : agents_) hard_update(a.target, a.net);
    }
    ++episodes_done_;
    return EpisodeMetrics{episodes_done_, plan.full_set ? "odd" : "even", acc,
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
  const Scenario& scenario_copy2() const { return sc2_; }
  const Ducm2Config& config() const { return cfg_; }
  std::vector<Agent>& agents() { return agents_; }
  const std::vector<Agent>& agents() const { return agents_; }
  Rng& plan_rng() { return plan_rng_; }
  int episodes_done() const { return episodes_done_; }
  void set_episodes_done(int e) { episodes_done_ = e; }

 private:
  Scenario sc_;
  Scenario sc2_;
  Ducm2Config cfg_;
  std::vector<Agent> agents_;
  Rng plan_rng_;
  int episodes_done_ = 0;
};

struct FleetEvent {
  int t = 0;
  bool join = false;  // false = quit
  int uav = -1;
};

struct EvalScript {
  std::vector<int> initial_active;  // empty means the whole fleet
  std::vector<FleetEvent> events;   // strictly increasing t >= 1
  int tail_steps = 0;               // 0 means quit_interval
};

struct PhaseResult {
  int phase = 0;
  int active_count = 0;
  int connected = 0;
};

struct DynamicEval {
  std::vector<PhaseResult> phases;          // one per inter-event segment
  std::vector<int> connected_per_step;      // after each joint move
  std::vector<std::vector<UavState>> positions;  // initial + per step
};

// Greedy rollout of the trained policies through a scripted sequence of
// fleet changes in a single environment. Each phase's steady connectivity is
// read at the last step before the next change.
inline DynamicEval eval_dynamic(const std::vector<Agent>& agents,
                                const Scenario& sc, const Ducm2Config& cfg,
                                const EvalScript& script,
                                const std::vector<std::pair<int, int>>&
                                    start_xy = {}) {
  const int n = sc.n_uavs;
  if (agents.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("eval_dynamic: one policy per UAV required");
  const auto& starts = start_xy.empty() ? sc.initial_xy : start_xy;
  if (starts.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("eval_dynamic: one start per UAV required");

  std::vector<UavState> uavs;
  for (int i = 0; i < n; ++i)
    uavs.push_back(UavState{i, starts[static_cast<std::size_t>(i)].first,
                            starts[static_cast<std::size_t>(i)].second, false});
  if (script.initial_active.empty()) {
    for (auto& u : uavs) u.alive = true;
  } else {
    for (int id : script.initial_active) {
      if (id < 0 || id >= n)
        throw std::invalid_argument("eval_dynamic: bad initial id");
      uavs[static_cast<std::size_t>(id)].alive = true;
    }
  }
  int active = static_cast<int>(std::count_if(
      uavs.begin(), uavs.end(), [](const UavState& u) { return u.alive; }));
  if (active < 1 || active > n)
    throw std::invalid_argument("eval_dynamic: active count out of range");
  for (std::size_t e = 0; e < script.events.size(); ++e) {
    if (script.events[e].t < 1 ||
        (e > 0 && script.events[e].t <= script.events[e - 1].t))
      throw std::invalid_argument(
          "eval_dynamic: event times must be strictly increasing and >= 1");
    if (script.events[e].uav < 0 || script.events[e].uav >= n)
      throw std::invalid_argument("eval_dynamic: bad event id");
  }

  const int tail = script.tail_steps > 0 ? script.tail_steps : cfg.quit_interval;
  const int t_end =
      (script.events.empty() ? 0 : script.events.back().t) + tail;

  DynamicEval out;
  out.positions.push_back(uavs);
  std::size_t next_event = 0;
  std::vector<int> actions(static_cast<std::size_t>(n), kHover);
  for (int t = 0; t < t_end; ++t) {
    if (next_event < script.events.size() &&
        script.events[next_event].t == t) {
      const FleetEvent& ev = script.events[next_event];
      UavState& u = uavs[static_cast<std::size_t>(ev.uav)];
      if (ev.join) {
        if (u.alive)
          throw std::invalid_argument("eval_dynamic: join of an active UAV");
        u.alive = true;
        u.x_idx = cfg.entry_xy.first;
        u.y_idx = cfg.entry_xy.second;
        ++active;
      } else {
        if (!u.alive)
          throw std::invalid_argument("eval_dynamic: quit of an inactive UAV");
        u.alive = false;
        --active;
      }
      if (active < 1 || active > n)
        throw std::invalid_argument("eval_dynamic: active count out of range");
      ++next_event;
    }
    const double code = live_code(alive_mask(uavs));
    for (int i = 0; i < n; ++i) {
      actions[static_cast<std::size_t>(i)] = kHover;
      const UavState& u = uavs[static_cast<std::size_t>(i)];
      if (!u.alive) continue;
      actions[static_cast<std::size_t>(i)] =
          agents[static_cast<std::size_t>(i)].net.argmax_action(
              build_state2(u, sc.grid, code, t, cfg.steps));
    }
    apply_joint(uavs, actions, sc.grid);
    out.positions.push_back(uavs);
    out.connected_per_step.push_back(assoc_at(sc, uavs, t + 1).connected_total);
    const int next_boundary = next_event < script.events.size()
                                  ? script.events[next_event].t
                                  : t_end;
    if (t + 1 == next_boundary) {
      out.phases.push_back(PhaseResult{static_cast<int>(out.phases.size()),
                                       active,
                                       out.connected_per_step.back()});
    }
  }
  return out;
}

inline DynamicEval eval_dynamic(const Ducm2Trainer& tr,
                                const EvalScript& script,
                                const std::vector<std::pair<int, int>>&
                                    start_xy = {}) {
  return eval_dynamic(tr.agents(), tr.scenario(), tr.config(), script,
                      start_xy);
}

}  // namespace ucn
