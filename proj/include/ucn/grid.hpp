// Discretized target region, UAV motion with boundary clamping, and
// deterministic user layout generation (stationary or scheduled hotspot
// distributions).

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ucn/rng.hpp"

namespace ucn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// M-by-M grid of intersections over an L x L region, L = (M-1)*cell_len.
struct GridSpec {
  int m = 11;
  double cell_len = 100.0;

  bool operator==(const GridSpec&) const = default;

  double side_len() const { return (m - 1) * cell_len; }

  Vec2 to_meters(int x_idx, int y_idx) const {
    return {x_idx * cell_len, y_idx * cell_len};
  }

  bool in_bounds(int x_idx, int y_idx) const {
    return x_idx >= 0 && x_idx < m && y_idx >= 0 && y_idx < m;
  }

  void validate() const {
    if (m < 2) throw std::invalid_argument("GridSpec: m must be >= 2");
    if (cell_len <= 0.0)
      throw std::invalid_argument("GridSpec: cell_len must be > 0");
  }
};

struct UavState {
  int id = 0;
  int x_idx = 0;
  int y_idx = 0;
  bool alive = true;
};

// Action codes: 0=hover, 1=left(-x), 2=right(+x), 3=forward(+y), 4=backward(-y).
inline constexpr int kNumActions = 5;
enum Action : int {
  kHover = 0,
  kLeft = 1,
  kRight = 2,
  kForward = 3,
  kBackward = 4,
};

struct MoveResult {
  UavState state;
  bool out_of_bound = false;
};

// One grid step in the chosen direction. A move that would exit the grid
// leaves the position unchanged and flags out_of_bound; hover never flags.
inline MoveResult apply_action(const UavState& s, int action,
                               const GridSpec& grid) {
  int dx = 0, dy = 0;
  switch (action) {
    case kHover: break;
    case kLeft: dx = -1; break;
    case kRight: dx = 1; break;
    case kForward: dy = 1; break;
    case kBackward: dy = -1; break;
    default:
      throw std::invalid_argument("apply_action: invalid action code " +
                                  std::to_string(action));
  }
  MoveResult r{s, false};
  const int nx = s.x_idx + dx;
  const int ny = s.y_idx + dy;
  if (grid.in_bounds(nx, ny)) {
    r.state.x_idx = nx;
    r.state.y_idx = ny;
  } else {
    r.out_of_bound = true;  // clamped: position unchanged
  }
  return r;
}

// Hotspot user distribution: round(p_hot * n_users) users uniform within
// hotspot disks (assigned round-robin), the rest uniform over the region.
struct HotspotSpec {
  int n_hotspots = 4;
  double hotspot_radius = 100.0;
  double p_hot = 0.8;
  int n_users = 100;
  std::uint64_t seed = 1;
};

inline std::vector<Vec2> generate_positions(const HotspotSpec& spec,
                                            const GridSpec& grid) {
  grid.validate();
  if (spec.p_hot < 0.0 || spec.p_hot > 1.0)
    throw std::invalid_argument("HotspotSpec: p_hot must be in [0,1]");
  if (spec.n_users < 0)
    throw std::invalid_argument("HotspotSpec: n_users must be >= 0");
  if (spec.p_hot > 0.0 && spec.n_hotspots == 0)
    throw std::invalid_argument(
        "HotspotSpec: n_hotspots must be > 0 when p_hot > 0");

  const double L = grid.side_len();
  const double R = spec.hotspot_radius;
  const int n_hot = static_cast<int>(std::lround(spec.p_hot * spec.n_users));

  Rng rng(spec.seed);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(spec.n_users));

  if (n_hot > 0) {
    if (2.0 * R > L)
      throw std::invalid_argument(
          "HotspotSpec: hotspot_radius too large for region");
    std::vector<Vec2> centers(static_cast<std::size_t>(spec.n_hotspots));
    for (auto& c : centers) c = {rng.uniform(R, L - R), rng.uniform(R, L - R)};
    for (int u = 0; u < n_hot; ++u) {
      const Vec2& c = centers[static_cast<std::size_t>(u % spec.n_hotspots)];
      const double rr = R * std::sqrt(rng.uniform());
      const double phi = 2.0 * M_PI * rng.uniform();
      out.push_back({c.x + rr * std::cos(phi), c.y + rr * std::sin(phi)});
    }
  }
  for (int u = n_hot; u < spec.n_users; ++u)
    out.push_back({rng.uniform(0.0, L), rng.uniform(0.0, L)});
  return out;
}

// A set of user layouts plus the schedule selecting which one is active at
// step t. The schedule always has a t_start = 0 entry.
struct EpochEntry {
  int t_start = 0;
  int layout_id = 0;
};

struct UserLayout {
  std::vector<std::vector<Vec2>> layouts;
  std::vector<EpochEntry> schedule;

  static UserLayout single(std::vector<Vec2> positions) {
    UserLayout l;
    l.layouts.push_back(std::move(positions));
    l.schedule.push_back({0, 0});
    return l;
  }

  void validate() const {
    if (schedule.empty() || schedule.front().t_start != 0)
      throw std::invalid_argument("UserLayout: schedule must start at t=0");
    for (std::size_t i = 1; i < schedule.size(); ++i)
      if (schedule[i].t_start <= schedule[i - 1].t_start)
        throw std::invalid_argument(
            "UserLayout: schedule start times must be strictly increasing");
    for (const auto& e : schedule)
      if (e.layout_id < 0 ||
          e.layout_id >= static_cast<int>(layouts.size()))
        throw std::invalid_argument("UserLayout: schedule references missing layout");
  }

  const std::vector<Vec2>& active(int t) const {
    int id = schedule.front().layout_id;
    for (const auto& e : schedule) {
      if (e.t_start > t) break;
      id = e.layout_id;
    }
    return layouts[static_cast<std::size_t>(id)];
  }
};

inline UserLayout generate_layout(const HotspotSpec& spec,
                                  const GridSpec& grid) {
  return UserLayout::single(generate_positions(spec, grid));
}

inline const std::vector<Vec2>& active_layout(const UserLayout& layout, int t) {
  return layout.active(t);
}

}  // namespace ucn
