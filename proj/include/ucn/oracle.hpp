// Exhaustive optimal-placement search over grid intersections: enumerates
// unordered position multisets in lexicographic order, reuses cached
// per-point link columns, and prunes branches whose cover-count bound cannot
// beat the incumbent. Ground truth for policy quality at a single step.

#pragma once

#include <algorithm>
#include <climits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ucn/association.hpp"
#include "ucn/grid.hpp"
#include "ucn/radio.hpp"

namespace ucn {

struct OracleResult {
  std::vector<std::pair<int, int>> best_xy;  // ascending grid indices
  int best_connected = -1;
  long long evaluated = 0;  // association evaluations actually run
};

// Number of multisets of size k over `points` items: C(points+k-1, k).
inline long long multiset_tuple_count(int points, int k) {
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(points - 1 + i) / static_cast<unsigned>(i);
    if (c > static_cast<unsigned __int128>(LLONG_MAX)) return LLONG_MAX;
  }
  return static_cast<long long>(c);
}

namespace detail {

struct OracleSearch {
  int k = 0, m = 0, n_points = 0, n_users = 0, cap = 0;
  const ChannelParams* params = nullptr;
  std::vector<double> amp, pow;  // [point * n_users + user]
  std::vector<std::uint8_t> cov;
  std::vector<int> cover_count;  // users within the disk, per point
  std::vector<int> suffix_max;   // max cover_count over points >= g
  LinkTable table;               // scratch, columns filled along the DFS
  std::vector<int> tuple;
  OracleResult best;

  void dfs(int depth, int start, int cover_sum) {
    if (depth == k) {
      if (std::min(cover_sum, cap) <= best.best_connected) return;
      ++best.evaluated;
      const AssociationResult res = associate(table, *params);
      if (res.connected_total > best.best_connected) {
        best.best_connected = res.connected_total;
        best.best_xy.clear();
        for (int g : tuple) best.best_xy.emplace_back(g / m, g % m);
      }
      return;
    }
    const int remaining = k - depth;
    for (int g = start; g < n_points; ++g) {
      // The bound only shrinks as g advances (suffix_max is non-increasing),
      // so the first hopeless point ends the whole scan.
      const int bound = std::min(
          cover_sum + remaining * suffix_max[static_cast<std::size_t>(g)], cap);
      if (bound <= best.best_connected) break;
      for (int u = 0; u < n_users; ++u) {
        const std::size_t src = static_cast<std::size_t>(g) * n_users + u;
        const std::size_t dst = static_cast<std::size_t>(u) * k + depth;
        table.amp_gain[dst] = amp[src];
        table.pow_gain[dst] = pow[src];
        table.covered[dst] = cov[src];
      }
      tuple[static_cast<std::size_t>(depth)] = g;
      dfs(depth + 1, g, cover_sum + cover_count[static_cast<std::size_t>(g)]);
    }
  }
};

}  // namespace detail

inline OracleResult brute_force_placement(int k, const GridSpec& grid,
                                          std::span<const Vec2> users,
                                          const ChannelParams& params,
                                          long long budget = 100000000) {
  grid.validate();
  params.validate();
  if (k < 1)
    throw std::invalid_argument("brute_force_placement: k must be >= 1");
  const int n_points = grid.m * grid.m;
  const long long total = multiset_tuple_count(n_points, k);
  if (total > budget)
    throw std::runtime_error(
        "brute_force_placement: " + std::to_string(total) +
        " position tuples exceed the budget of " + std::to_string(budget));

  detail::OracleSearch s;
  s.k = k;
  s.m = grid.m;
  s.n_points = n_points;
  s.n_users = static_cast<int>(users.size());
  s.cap = std::min(k * params.n_rb, s.n_users);
  s.params = &params;
  const std::size_t cells =
      static_cast<std::size_t>(n_points) * static_cast<std::size_t>(s.n_users);
  s.amp.assign(cells, 0.0);
  s.pow.assign(cells, 0.0);
  s.cov.assign(cells, 0);
  s.cover_count.assign(static_cast<std::size_t>(n_points), 0);
  const double r = params.coverage_radius();
  for (int g = 0; g < n_points; ++g) {
    const Vec2 pos = grid.to_meters(g / grid.m, g % grid.m);
    for (int u = 0; u < s.n_users; ++u) {
      if (dist(pos, users[static_cast<std::size_t>(u)]) > r) continue;
      const double pl = path_loss_db(
          slant_dist(pos, users[static_cast<std::size_t>(u)], params), params);
      const std::size_t idx = static_cast<std::size_t>(g) * s.n_users + u;
      s.amp[idx] = channel_gain(pl);
      s.pow[idx] = power_gain(pl, params);
      s.cov[idx] = 1;
      ++s.cover_count[static_cast<std::size_t>(g)];
    }
  }
  s.suffix_max.assign(static_cast<std::size_t>(n_points) + 1, 0);
  for (int g = n_points - 1; g >= 0; --g)
    s.suffix_max[static_cast<std::size_t>(g)] =
        std::max(s.suffix_max[static_cast<std::size_t>(g) + 1],
                 s.cover_count[static_cast<std::size_t>(g)]);

  s.table.n_users = s.n_users;
  s.table.n_uavs = k;
  s.table.amp_gain.assign(static_cast<std::size_t>(s.n_users) * k, 0.0);
  s.table.pow_gain.assign(static_cast<std::size_t>(s.n_users) * k, 0.0);
  s.table.covered.assign(static_cast<std::size_t>(s.n_users) * k, 0);
  s.tuple.assign(static_cast<std::size_t>(k), 0);
  s.dfs(0, 0, 0);
  return s.best;
}

}  // namespace ucn
