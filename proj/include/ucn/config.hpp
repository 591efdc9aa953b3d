// Run configuration: JSON schema with strict key checking, defaults matching
// the reference parameter table, "auto" placeholders for derived values, and
// the materializers that turn a config into scenario + trainer settings.

#pragma once

#include <array>
#include <cstdio>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ucn/ducm1.hpp"
#include "ucn/ducm2.hpp"
#include "ucn/io.hpp"
#include "ucn/rng.hpp"
#include "ucn/scenario.hpp"

namespace ucn {

struct RunConfig {
  GridSpec grid;
  ChannelParams channel;
  // users
  int n_users = 100;
  int n_hotspots = 4;
  double hotspot_radius_m = 100.0;
  double p_hot = 0.8;
  std::uint64_t layout_seed = 1;
  std::vector<std::pair<int, std::uint64_t>> layout_schedule;  // (t_start, seed)
  std::string users_manifest;  // file override for the user scenario
  // fleet
  int n_uavs = 5;
  std::vector<std::pair<int, int>> initial_positions;  // empty = auto
  RewardParams reward;
  // training
  int level = 3;
  int episodes = 1000;
  int steps = 100;
  double epsilon = 0.1;
  double gamma = 0.95;
  double lr = 0.0;  // 0 = auto (per-algorithm default)
  int batch = 512;
  int replay_capacity = 100000;
  int target_update = 10;
  double clip_norm = 1.0;
  std::string optimizer = "adam";
  std::vector<int> hidden;      // empty = auto
  int include_time_state = -1;  // -1 auto, 0 off, 1 on
  bool timing = false;          // fill wall_ms in metrics (breaks byte-reproducibility)
  int checkpoint_every = 0;     // 0 = final checkpoint only
  // dynamic-fleet training
  int ducm2_steps = 150;
  int quit_interval = 0;  // 0 = auto 2(M-1)
  std::pair<int, int> entry_position = {0, 0};
  std::uint64_t copy2_layout_seed = 0;  // 0 = auto
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::string& section,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::runtime_error("config: section \"" + section +
                             "\" must be an object");
  for (const auto& [key, val] : j.items()) {
    (void)val;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::runtime_error("config: unknown key \"" +
                               (section.empty() ? key : section + "." + key) +
                               "\"");
  }
}

inline bool is_auto(const nlohmann::json& v) {
  return v.is_string() && v.get<std::string>() == "auto";
}

inline std::vector<std::pair<int, int>> parse_xy_list(
    const nlohmann::json& v, const std::string& what) {
  std::vector<std::pair<int, int>> out;
  if (!v.is_array())
    throw std::runtime_error("config: " + what + " must be an array of [x,y]");
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2)
      throw std::runtime_error("config: " + what + " entries must be [x,y]");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

}  // namespace detail

inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["grid"] = {{"m", c.grid.m}, {"cell_len_m", c.grid.cell_len}};
  j["channel"] = {{"fc_hz", c.channel.fc_hz},
                  {"eta_db", c.channel.eta_db},
                  {"pt_dbm_hz", c.channel.pt_dbm_hz},
                  {"n0_dbm_hz", c.channel.n0_dbm_hz},
                  {"rb_bw_hz", c.channel.bw_rb_hz},
                  {"r_min_bps", c.channel.r_min_bps},
                  {"altitude_m", c.channel.altitude_m},
                  {"beamwidth_deg", c.channel.aperture_rad * 180.0 / M_PI},
                  {"n_rb", c.channel.n_rb},
                  {"gain_exp_divisor", c.channel.gain_exp_divisor}};
  j["users"] = {{"n", c.n_users},
                {"hotspots", c.n_hotspots},
                {"hotspot_radius_m", c.hotspot_radius_m},
                {"p_hot", c.p_hot},
                {"layout_seed", c.layout_seed}};
  if (!c.layout_schedule.empty()) {
    nlohmann::json sched = nlohmann::json::array();
    for (const auto& [t0, seed] : c.layout_schedule)
      sched.push_back({{"t_start", t0}, {"layout_seed", seed}});
    j["users"]["schedule"] = std::move(sched);
  }
  if (!c.users_manifest.empty()) j["users"]["manifest"] = c.users_manifest;
  if (c.initial_positions.empty()) {
    j["uavs"] = {{"n", c.n_uavs}, {"initial_positions", "auto"}};
  } else {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& [x, y] : c.initial_positions) pos.push_back({x, y});
    j["uavs"] = {{"n", c.n_uavs}, {"initial_positions", std::move(pos)}};
  }
  j["reward"] = {{"d_p", c.reward.d_p},
                 {"f_penalty", c.reward.f_penalty},
                 {"ducm2_own_connectivity", c.reward.ducm2_own_connectivity}};
  j["train"] = {{"level", c.level},
                {"episodes", c.episodes},
                {"steps", c.steps},
                {"epsilon", c.epsilon},
                {"gamma", c.gamma},
                {"batch", c.batch},
                {"replay_capacity", c.replay_capacity},
                {"target_update", c.target_update},
                {"clip_norm", c.clip_norm},
                {"optimizer", c.optimizer},
                {"timing", c.timing},
                {"checkpoint_every", c.checkpoint_every}};
  j["train"]["lr"] = c.lr > 0.0 ? nlohmann::json(c.lr) : nlohmann::json("auto");
  j["train"]["hidden"] =
      c.hidden.empty() ? nlohmann::json("auto") : nlohmann::json(c.hidden);
  j["train"]["include_time_state"] =
      c.include_time_state < 0 ? nlohmann::json("auto")
                               : nlohmann::json(c.include_time_state != 0);
  j["ducm2"] = {{"steps", c.ducm2_steps},
                {"entry_position",
                 {c.entry_position.first, c.entry_position.second}}};
  j["ducm2"]["quit_interval"] = c.quit_interval > 0
                                    ? nlohmann::json(c.quit_interval)
                                    : nlohmann::json("auto");
  j["ducm2"]["copy2_layout_seed"] = c.copy2_layout_seed != 0
                                        ? nlohmann::json(c.copy2_layout_seed)
                                        : nlohmann::json("auto");
  j["seed"] = c.seed;
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  detail::require_keys(j, "", {"grid", "channel", "users", "uavs", "reward",
                               "train", "ducm2", "seed"});
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::require_keys(g, "grid", {"m", "cell_len_m"});
    if (g.contains("m")) c.grid.m = g.at("m").get<int>();
    if (g.contains("cell_len_m"))
      c.grid.cell_len = g.at("cell_len_m").get<double>();
  }
  if (j.contains("channel")) {
    const auto& ch = j.at("channel");
    detail::require_keys(ch, "channel",
                         {"fc_hz", "eta_db", "pt_dbm_hz", "n0_dbm_hz",
                          "rb_bw_hz", "r_min_bps", "altitude_m",
                          "beamwidth_deg", "n_rb", "gain_exp_divisor"});
    if (ch.contains("fc_hz")) c.channel.fc_hz = ch.at("fc_hz").get<double>();
    if (ch.contains("eta_db")) c.channel.eta_db = ch.at("eta_db").get<double>();
    if (ch.contains("pt_dbm_hz"))
      c.channel.pt_dbm_hz = ch.at("pt_dbm_hz").get<double>();
    if (ch.contains("n0_dbm_hz"))
      c.channel.n0_dbm_hz = ch.at("n0_dbm_hz").get<double>();
    if (ch.contains("rb_bw_hz"))
      c.channel.bw_rb_hz = ch.at("rb_bw_hz").get<double>();
    if (ch.contains("r_min_bps"))
      c.channel.r_min_bps = ch.at("r_min_bps").get<double>();
    if (ch.contains("altitude_m"))
      c.channel.altitude_m = ch.at("altitude_m").get<double>();
    if (ch.contains("beamwidth_deg"))
      c.channel.aperture_rad = ch.at("beamwidth_deg").get<double>() * M_PI / 180.0;
    if (ch.contains("n_rb")) c.channel.n_rb = ch.at("n_rb").get<int>();
    if (ch.contains("gain_exp_divisor"))
      c.channel.gain_exp_divisor = ch.at("gain_exp_divisor").get<double>();
  }
  if (j.contains("users")) {
    const auto& u = j.at("users");
    detail::require_keys(u, "users",
                         {"n", "hotspots", "hotspot_radius_m", "p_hot",
                          "layout_seed", "schedule", "manifest"});
    if (u.contains("n")) c.n_users = u.at("n").get<int>();
    if (u.contains("hotspots")) c.n_hotspots = u.at("hotspots").get<int>();
    if (u.contains("hotspot_radius_m"))
      c.hotspot_radius_m = u.at("hotspot_radius_m").get<double>();
    if (u.contains("p_hot")) c.p_hot = u.at("p_hot").get<double>();
    if (u.contains("layout_seed"))
      c.layout_seed = u.at("layout_seed").get<std::uint64_t>();
    if (u.contains("schedule")) {
      for (const auto& e : u.at("schedule")) {
        detail::require_keys(e, "users.schedule", {"t_start", "layout_seed"});
        c.layout_schedule.emplace_back(e.at("t_start").get<int>(),
                                       e.at("layout_seed").get<std::uint64_t>());
      }
    }
    if (u.contains("manifest"))
      c.users_manifest = u.at("manifest").get<std::string>();
  }
  if (j.contains("uavs")) {
    const auto& u = j.at("uavs");
    detail::require_keys(u, "uavs", {"n", "initial_positions"});
    if (u.contains("n")) c.n_uavs = u.at("n").get<int>();
    if (u.contains("initial_positions") &&
        !detail::is_auto(u.at("initial_positions")))
      c.initial_positions =
          detail::parse_xy_list(u.at("initial_positions"), "uavs.initial_positions");
  }
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    detail::require_keys(r, "reward",
                         {"d_p", "f_penalty", "ducm2_own_connectivity"});
    if (r.contains("d_p")) c.reward.d_p = r.at("d_p").get<double>();
    if (r.contains("f_penalty"))
      c.reward.f_penalty = r.at("f_penalty").get<double>();
    if (r.contains("ducm2_own_connectivity"))
      c.reward.ducm2_own_connectivity =
          r.at("ducm2_own_connectivity").get<bool>();
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    detail::require_keys(
        t, "train",
        {"level", "episodes", "steps", "epsilon", "gamma", "lr", "batch",
         "replay_capacity", "target_update", "clip_norm", "optimizer",
         "hidden", "include_time_state", "timing", "checkpoint_every"});
    if (t.contains("level")) c.level = t.at("level").get<int>();
    if (t.contains("episodes")) c.episodes = t.at("episodes").get<int>();
    if (t.contains("steps")) c.steps = t.at("steps").get<int>();
    if (t.contains("epsilon")) c.epsilon = t.at("epsilon").get<double>();
    if (t.contains("gamma")) c.gamma = t.at("gamma").get<double>();
    if (t.contains("lr") && !detail::is_auto(t.at("lr")))
      c.lr = t.at("lr").get<double>();
    if (t.contains("batch")) c.batch = t.at("batch").get<int>();
    if (t.contains("replay_capacity"))
      c.replay_capacity = t.at("replay_capacity").get<int>();
    if (t.contains("target_update"))
      c.target_update = t.at("target_update").get<int>();
    if (t.contains("clip_norm")) c.clip_norm = t.at("clip_norm").get<double>();
    if (t.contains("optimizer"))
      c.optimizer = t.at("optimizer").get<std::string>();
    if (t.contains("hidden") && !detail::is_auto(t.at("hidden")))
      c.hidden = t.at("hidden").get<std::vector<int>>();
    if (t.contains("include_time_state") &&
        !detail::is_auto(t.at("include_time_state")))
      c.include_time_state = t.at("include_time_state").get<bool>() ? 1 : 0;
    if (t.contains("timing")) c.timing = t.at("timing").get<bool>();
    if (t.contains("checkpoint_every"))
      c.checkpoint_every = t.at("checkpoint_every").get<int>();
  }
  if (j.contains("ducm2")) {
    const auto& d = j.at("ducm2");
    detail::require_keys(
        d, "ducm2",
        {"steps", "quit_interval", "entry_position", "copy2_layout_seed"});
    if (d.contains("steps")) c.ducm2_steps = d.at("steps").get<int>();
    if (d.contains("quit_interval") && !detail::is_auto(d.at("quit_interval")))
      c.quit_interval = d.at("quit_interval").get<int>();
    if (d.contains("entry_position")) {
      const auto v = detail::parse_xy_list(
          nlohmann::json::array({d.at("entry_position")}), "ducm2.entry_position");
      c.entry_position = v.front();
    }
    if (d.contains("copy2_layout_seed") &&
        !detail::is_auto(d.at("copy2_layout_seed")))
      c.copy2_layout_seed = d.at("copy2_layout_seed").get<std::uint64_t>();
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad config JSON: " + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad config value: " + e.what());
  }
}

inline void save_run_config(const std::string& path, const RunConfig& c) {
  auto out = open_output(path);
  out << run_config_to_json(c).dump(2) << '\n';
}

// Stable fingerprint over the canonical (key-sorted) serialized form.
inline std::string config_hash(const RunConfig& c) {
  const std::uint64_t h = fnv1a64(run_config_to_json(c).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline UserLayout make_user_layout(const RunConfig& c) {
  if (!c.users_manifest.empty()) return read_layout_manifest(c.users_manifest);
  const auto gen = [&](std::uint64_t seed) {
    return generate_positions(
        HotspotSpec{c.n_hotspots, c.hotspot_radius_m, c.p_hot, c.n_users, seed},
        c.grid);
  };
  if (c.layout_schedule.empty()) return UserLayout::single(gen(c.layout_seed));
  UserLayout layout;
  for (const auto& [t0, seed] : c.layout_schedule) {
    layout.layouts.push_back(gen(seed));
    layout.schedule.push_back(
        {t0, static_cast<int>(layout.layouts.size()) - 1});
  }
  layout.validate();
  return layout;
}

// The second environment copy re-samples users from the same spec under a
// derived seed, keeping the two copies statistically identical.
inline UserLayout make_copy2_layout(const RunConfig& c) {
  if (!c.users_manifest.empty()) return read_layout_manifest(c.users_manifest);
  const auto derive = [&](std::uint64_t seed) {
    return c.copy2_layout_seed != 0
               ? c.copy2_layout_seed
               : splitmix64(seed ^ fnv1a64("copy2-users"));
  };
  const auto gen = [&](std::uint64_t seed) {
    return generate_positions(
        HotspotSpec{c.n_hotspots, c.hotspot_radius_m, c.p_hot, c.n_users,
                    derive(seed)},
        c.grid);
  };
  if (c.layout_schedule.empty()) return UserLayout::single(gen(c.layout_seed));
  UserLayout layout;
  for (const auto& [t0, seed] : c.layout_schedule) {
    layout.layouts.push_back(gen(seed));
    layout.schedule.push_back(
        {t0, static_cast<int>(layout.layouts.size()) - 1});
  }
  layout.validate();
  return layout;
}

inline Scenario make_scenario(const RunConfig& c) {
  Scenario sc;
  sc.grid = c.grid;
  sc.channel = c.channel;
  sc.reward = c.reward;
  sc.n_uavs = c.n_uavs;
  sc.users = make_user_layout(c);
  if (!c.initial_positions.empty()) {
    sc.initial_xy = c.initial_positions;
  } else {
    Rng rng = Rng(c.seed).derive("uav-start");
    const auto picks = rng.sample_indices(c.grid.m * c.grid.m, c.n_uavs);
    for (int g : picks) sc.initial_xy.emplace_back(g / c.grid.m, g % c.grid.m);
  }
  sc.validate();
  return sc;
}

inline OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw std::runtime_error("config: optimizer must be adam or sgd");
}

inline Ducm1Config make_ducm1_config(const RunConfig& c, const Scenario& sc) {
  Ducm1Config d;
  d.level = c.level;
  d.n_episodes = c.episodes;
  d.steps = c.steps;
  d.epsilon = c.epsilon;
  d.gamma = c.gamma;
  d.lr = c.lr > 0.0 ? c.lr : 2.5e-4;
  d.batch = c.batch;
  d.replay_capacity = c.replay_capacity;
  d.target_update = c.target_update;
  d.clip_norm = c.clip_norm;
  d.optimizer = parse_optimizer(c.optimizer);
  if (!c.hidden.empty())
    d.hidden = c.hidden;
  else
    d.hidden = c.level <= 3 ? std::vector<int>{400, 400}
                            : std::vector<int>{256, 256, 256};
  d.include_time_state = c.include_time_state >= 0
                             ? c.include_time_state != 0
                             : sc.users.schedule.size() > 1;
  d.seed = c.seed;
  return d;
}

inline Ducm2Config make_ducm2_config(const RunConfig& c) {
  Ducm2Config d;
  d.n_episodes = c.episodes;
  d.steps = c.ducm2_steps;
  d.quit_interval = c.quit_interval > 0 ? c.quit_interval : 2 * (c.grid.m - 1);
  d.epsilon = c.epsilon;
  d.gamma = c.gamma;
  d.lr = c.lr > 0.0 ? c.lr : 3.5e-4;
  d.batch = c.batch;
  d.replay_capacity = c.replay_capacity;
  d.target_update = c.target_update;
  d.clip_norm = c.clip_norm;
  d.optimizer = parse_optimizer(c.optimizer);
  d.hidden = !c.hidden.empty() ? c.hidden : std::vector<int>{400, 400, 400};
  d.entry_xy = c.entry_position;
  d.seed = c.seed;
  return d;
}

}  // namespace ucn
