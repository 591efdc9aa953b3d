// Air-to-ground link budget: path loss, channel gain, per-RB SINR with
// inter-UAV interference, and per-user RB demand.
//
// All SINR arithmetic is done in the linear domain; dBm/Hz constants are
// converted once.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ucn/grid.hpp"

namespace ucn {

inline constexpr double kLightSpeed = 299792458.0;

struct ChannelParams {
  double fc_hz = 2e9;            // carrier frequency
  double eta_db = 1.0;           // excessive path loss (LoS)
  double pt_dbm_hz = -49.5;      // transmit PSD
  double n0_dbm_hz = -174.0;     // noise PSD
  double bw_rb_hz = 180e3;       // RB bandwidth
  double r_min_bps = 250e3;      // per-user throughput floor
  double altitude_m = 350.0;     // UAV altitude H
  double aperture_rad = M_PI / 3.0;  // antenna aperture angle theta
  int n_rb = 20;                 // RB cap per UAV

  // Exponent divisor for the power gain used in SINR: 10 is the
  // conventional power form (10^(-PL/10)); 20 reproduces the literal
  // amplitude form G = 10^(-PL/20) fed straight into the SINR ratio.
  double gain_exp_divisor = 10.0;

  bool operator==(const ChannelParams&) const = default;

  double coverage_radius() const {
    return altitude_m * std::tan(aperture_rad / 2.0);
  }
  double pt_mw_hz() const { return std::pow(10.0, pt_dbm_hz / 10.0); }
  double n0_mw_hz() const { return std::pow(10.0, n0_dbm_hz / 10.0); }

  void validate() const {
    if (fc_hz <= 0) throw std::invalid_argument("ChannelParams: fc_hz <= 0");
    if (bw_rb_hz <= 0)
      throw std::invalid_argument("ChannelParams: bw_rb_hz <= 0");
    if (r_min_bps <= 0)
      throw std::invalid_argument("ChannelParams: r_min_bps <= 0");
    if (aperture_rad <= 0 || aperture_rad >= M_PI)
      throw std::invalid_argument("ChannelParams: aperture_rad out of (0, pi)");
    if (altitude_m <= 0)
      throw std::invalid_argument("ChannelParams: altitude_m <= 0");
    if (n_rb <= 0) throw std::invalid_argument("ChannelParams: n_rb <= 0");
    if (gain_exp_divisor != 10.0 && gain_exp_divisor != 20.0)
      throw std::invalid_argument(
          "ChannelParams: gain_exp_divisor must be 10 or 20");
  }
};

// Free-space path loss plus excessive loss, dB. d is the 3D slant distance.
inline double path_loss_db(double d_m, const ChannelParams& p) {
  if (d_m <= 0.0) throw std::invalid_argument("path_loss_db: d must be > 0");
  return 20.0 * std::log10(4.0 * M_PI * p.fc_hz * d_m / kLightSpeed) +
         p.eta_db;
}

// Amplitude channel gain G = 10^(-PL/20). Used for association ranking.
inline double channel_gain(double pl_db) {
  return std::pow(10.0, -pl_db / 20.0);
}

// Power gain applied in the SINR ratio.
inline double power_gain(double pl_db, const ChannelParams& p) {
  return std::pow(10.0, -pl_db / p.gain_exp_divisor);
}

// 3D UAV-user distance (horizontal offset plus altitude).
inline double slant_dist(const Vec2& uav, const Vec2& user,
                         const ChannelParams& p) {
  const double dx = uav.x - user.x;
  const double dy = uav.y - user.y;
  return std::sqrt(dx * dx + dy * dy + p.altitude_m * p.altitude_m);
}

inline bool covers(const Vec2& uav, const Vec2& user, const ChannelParams& p) {
  return dist(uav, user) <= p.coverage_radius();
}

// Per-UAV count of allocated RBs; UAV j occupies RB indices 1..rb_used[j].
struct AllocationState {
  std::vector<int> rb_used;

  explicit AllocationState(std::size_t n_uavs = 0) : rb_used(n_uavs, 0) {}
};

// SINR for user at `user` served by UAV `serving` on RB index n (1-based).
// Interference comes from UAVs j != serving in `covering` whose current
// allocation reaches RB n. With no such UAV this is the plain SNR.
inline double sinr_on_rb(const Vec2& user, int serving, int n,
                         std::span<const int> covering,
                         std::span<const Vec2> uav_pos,
                         const AllocationState& alloc,
                         const ChannelParams& p) {
  if (n < 1 || n > p.n_rb)
    throw std::invalid_argument("sinr_on_rb: rb index out of range");
  const Vec2& spos = uav_pos[static_cast<std::size_t>(serving)];
  if (!covers(spos, user, p))
    throw std::invalid_argument("sinr_on_rb: serving UAV does not cover user");
  const double pt = p.pt_mw_hz();
  const double sig = pt * power_gain(path_loss_db(slant_dist(spos, user, p), p), p);
  double denom = p.n0_mw_hz();
  for (int j : covering) {
    if (j == serving) continue;
    if (alloc.rb_used[static_cast<std::size_t>(j)] < n) continue;
    const Vec2& jpos = uav_pos[static_cast<std::size_t>(j)];
    denom += pt * power_gain(path_loss_db(slant_dist(jpos, user, p), p), p);
  }
  return sig / denom;
}

struct RbDemand {
  int n_rbs = 0;
  double rate_bps = 0.0;
};

// Smallest RB count N such that the summed rate over candidate RBs
// k_i+1 .. k_i+N reaches r_min, where k_i is the serving UAV's current
// allocation. nullopt when even extending to the full cap cannot meet r_min.
inline std::optional<RbDemand> rb_demand(const Vec2& user, int serving,
                                         std::span<const int> covering,
                                         std::span<const Vec2> uav_pos,
                                         const AllocationState& alloc,
                                         const ChannelParams& p) {
  const int k_i = alloc.rb_used[static_cast<std::size_t>(serving)];
  double rate = 0.0;
  int n_assigned = 0;
  for (int n = k_i + 1; n <= p.n_rb; ++n) {
    const double s = sinr_on_rb(user, serving, n, covering, uav_pos, alloc, p);
    rate += p.bw_rb_hz * std::log2(1.0 + s);
    ++n_assigned;
    if (rate >= p.r_min_bps) return RbDemand{n_assigned, rate};
  }
  return std::nullopt;
}

}  // namespace ucn
