// Two-stage user admission and association. Produces the binary
// connectivity matrix X consumed by the objective and every reward design.
//
// Round 1: each covered user requests its best-gain covering UAV; UAVs
// (ascending id) admit requesters in descending gain order subject to RB
// availability, assigning consecutive RB indices. Later rounds: each still
// unadmitted user requests its next-best untried UAV, until nobody has a
// UAV left to try. RB demand is evaluated against the live allocation
// state, so interference reflects admissions made so far.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ucn/radio.hpp"

namespace ucn {

// Cached per-link quantities. Index layout: [user * n_uavs + uav].
struct LinkTable {
  int n_users = 0;
  int n_uavs = 0;
  std::vector<double> amp_gain;   // ranking gain 10^(-PL/20)
  std::vector<double> pow_gain;   // gain used in SINR
  std::vector<std::uint8_t> covered;

  double amp(int u, int i) const {
    return amp_gain[static_cast<std::size_t>(u) * n_uavs + i];
  }
  double pow(int u, int i) const {
    return pow_gain[static_cast<std::size_t>(u) * n_uavs + i];
  }
  bool cov(int u, int i) const {
    return covered[static_cast<std::size_t>(u) * n_uavs + i] != 0;
  }

  static LinkTable build(std::span<const Vec2> uav_pos,
                         std::span<const std::uint8_t> alive,
                         std::span<const Vec2> users,
                         const ChannelParams& p) {
    LinkTable t;
    t.n_users = static_cast<int>(users.size());
    t.n_uavs = static_cast<int>(uav_pos.size());
    const std::size_t n = users.size() * uav_pos.size();
    t.amp_gain.assign(n, 0.0);
    t.pow_gain.assign(n, 0.0);
    t.covered.assign(n, 0);
    const double r = p.coverage_radius();
    for (int u = 0; u < t.n_users; ++u) {
      for (int i = 0; i < t.n_uavs; ++i) {
        if (!alive.empty() && !alive[static_cast<std::size_t>(i)]) continue;
        const Vec2& up = uav_pos[static_cast<std::size_t>(i)];
        if (dist(up, users[static_cast<std::size_t>(u)]) > r) continue;
        const double pl =
            path_loss_db(slant_dist(up, users[static_cast<std::size_t>(u)], p), p);
        const std::size_t idx = static_cast<std::size_t>(u) * t.n_uavs + i;
        t.amp_gain[idx] = channel_gain(pl);
        t.pow_gain[idx] = power_gain(pl, p);
        t.covered[idx] = 1;
      }
    }
    return t;
  }
};

struct AssociationResult {
  std::vector<int> serving;           // per user: UAV id, or -1
  std::vector<int> rb_of_user;        // N_{i,u}; 0 when unconnected
  std::vector<double> rate_of_user;   // achieved bits/s; 0 when unconnected
  std::vector<int> rb_used;           // per UAV
  std::vector<int> connected_per_uav;
  int connected_total = 0;

  bool x(int u, int i) const { return serving[static_cast<std::size_t>(u)] == i; }
};

inline int connectivity_count(const AssociationResult& r) {
  return r.connected_total;
}

namespace detail {

// rb_demand against cached gains; same contract as radio::rb_demand.
inline std::optional<RbDemand> demand_from_table(const LinkTable& t, int u,
                                                 int i,
                                                 const AllocationState& alloc,
                                                 const ChannelParams& p) {
  const double pt = p.pt_mw_hz();
  const double n0 = p.n0_mw_hz();
  const double sig = pt * t.pow(u, i);
  const int k_i = alloc.rb_used[static_cast<std::size_t>(i)];
  double rate = 0.0;
  int n_assigned = 0;
  for (int n = k_i + 1; n <= p.n_rb; ++n) {
    double denom = n0;
    for (int j = 0; j < t.n_uavs; ++j) {
      if (j == i || !t.cov(u, j)) continue;
      if (alloc.rb_used[static_cast<std::size_t>(j)] < n) continue;
      denom += pt * t.pow(u, j);
    }
    rate += p.bw_rb_hz * std::log2(1.0 + sig / denom);
    ++n_assigned;
    if (rate >= p.r_min_bps) return RbDemand{n_assigned, rate};
  }
  return std::nullopt;
}

}  // namespace detail

inline AssociationResult associate(const LinkTable& t,
                                   const ChannelParams& p) {
  AssociationResult res;
  res.serving.assign(static_cast<std::size_t>(t.n_users), -1);
  res.rb_of_user.assign(static_cast<std::size_t>(t.n_users), 0);
  res.rate_of_user.assign(static_cast<std::size_t>(t.n_users), 0.0);
  res.rb_used.assign(static_cast<std::size_t>(t.n_uavs), 0);
  res.connected_per_uav.assign(static_cast<std::size_t>(t.n_uavs), 0);

  // Per-user candidate UAVs, best gain first, ties to the lowest id.
  std::vector<std::vector<int>> cand(static_cast<std::size_t>(t.n_users));
  for (int u = 0; u < t.n_users; ++u) {
    auto& c = cand[static_cast<std::size_t>(u)];
    for (int i = 0; i < t.n_uavs; ++i)
      if (t.cov(u, i)) c.push_back(i);
    std::sort(c.begin(), c.end(), [&](int a, int b) {
      if (t.amp(u, a) != t.amp(u, b)) return t.amp(u, a) > t.amp(u, b);
      return a < b;
    });
  }

  AllocationState alloc(static_cast<std::size_t>(t.n_uavs));
  std::vector<std::size_t> next_try(static_cast<std::size_t>(t.n_users), 0);

  for (;;) {
    std::vector<std::vector<int>> requests(static_cast<std::size_t>(t.n_uavs));
    bool any = false;
    for (int u = 0; u < t.n_users; ++u) {
      if (res.serving[static_cast<std::size_t>(u)] >= 0) continue;
      const auto& c = cand[static_cast<std::size_t>(u)];
      if (next_try[static_cast<std::size_t>(u)] >= c.size()) continue;
      requests[static_cast<std::size_t>(c[next_try[static_cast<std::size_t>(u)]])]
          .push_back(u);
      any = true;
    }
    if (!any) break;

    for (int i = 0; i < t.n_uavs; ++i) {
      auto& reqs = requests[static_cast<std::size_t>(i)];
      if (reqs.empty()) continue;
      std::sort(reqs.begin(), reqs.end(), [&](int a, int b) {
        if (t.amp(a, i) != t.amp(b, i)) return t.amp(a, i) > t.amp(b, i);
        return a < b;
      });
      for (int u : reqs) {
        next_try[static_cast<std::size_t>(u)] += 1;  // this UAV is now tried
        const auto d = detail::demand_from_table(t, u, i, alloc, p);
        if (!d) continue;  // misfit: skip and keep walking the list
        res.serving[static_cast<std::size_t>(u)] = i;
        res.rb_of_user[static_cast<std::size_t>(u)] = d->n_rbs;
        res.rate_of_user[static_cast<std::size_t>(u)] = d->rate_bps;
        alloc.rb_used[static_cast<std::size_t>(i)] += d->n_rbs;
        res.connected_per_uav[static_cast<std::size_t>(i)] += 1;
        res.connected_total += 1;
      }
    }
  }

  res.rb_used = alloc.rb_used;
  return res;
}

inline AssociationResult associate(std::span<const Vec2> uav_pos,
                                   std::span<const std::uint8_t> alive,
                                   std::span<const Vec2> users,
                                   const ChannelParams& p) {
  return associate(LinkTable::build(uav_pos, alive, users, p), p);
}

}  // namespace ucn
