// File formats: user-layout CSV, scheduled-layout manifest, fleet-event
// scripts, and association dumps.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucn/association.hpp"
#include "ucn/ducm2.hpp"
#include "ucn/grid.hpp"

namespace ucn {

// Shortest-ish fixed formatting used by every CSV artifact.
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

inline void write_layout_csv(const std::string& path,
                             const std::vector<Vec2>& users) {
  auto out = open_output(path);
  out << "user_id,x_m,y_m\n";
  for (std::size_t u = 0; u < users.size(); ++u)
    out << u << ',' << fmt_g(users[u].x) << ',' << fmt_g(users[u].y) << '\n';
}

inline std::vector<Vec2> read_layout_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("user_id,", 0) != 0)
    throw std::runtime_error(path + ": expected header user_id,x_m,y_m");
  std::vector<Vec2> users;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, x, y;
    if (!std::getline(ls, id, ',') || !std::getline(ls, x, ',') ||
        !std::getline(ls, y))
      throw std::runtime_error(path + ": malformed row: " + line);
    users.push_back({std::stod(x), std::stod(y)});
  }
  return users;
}

// Manifest: JSON array of {"t_start": int, "layout_file": path}; layout
// paths are resolved relative to the manifest's directory.
inline UserLayout read_layout_manifest(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad manifest: " + e.what());
  }
  if (!j.is_array() || j.empty())
    throw std::runtime_error(path + ": manifest must be a nonempty array");
  const auto dir = std::filesystem::path(path).parent_path();
  UserLayout layout;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("t_start") || !e.contains("layout_file"))
      throw std::runtime_error(path +
                               ": each entry needs t_start and layout_file");
    const auto file = dir / e.at("layout_file").get<std::string>();
    layout.layouts.push_back(read_layout_csv(file.string()));
    layout.schedule.push_back({e.at("t_start").get<int>(),
                               static_cast<int>(layout.layouts.size()) - 1});
  }
  layout.validate();
  return layout;
}

inline void write_assoc_csv(const std::string& path,
                            const AssociationResult& res) {
  auto out = open_output(path);
  out << "user_id,uav_id,n_rbs,rate_bps\n";
  for (std::size_t u = 0; u < res.serving.size(); ++u)
    out << u << ',' << res.serving[u] << ',' << res.rb_of_user[u] << ','
        << fmt_g(res.rate_of_user[u]) << '\n';
}

// Scripts come in two shapes: a bare array of events (the fleet starts
// complete) or an object that also names the initially active UAVs.
inline EvalScript script_from_json(const nlohmann::json& j) {
  EvalScript s;
  const nlohmann::json* events = &j;
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      if (key != "initial_active" && key != "events" && key != "tail_steps")
        throw std::runtime_error("script: unknown key \"" + key + "\"");
      (void)val;
    }
    if (j.contains("initial_active"))
      s.initial_active = j.at("initial_active").get<std::vector<int>>();
    if (j.contains("tail_steps")) s.tail_steps = j.at("tail_steps").get<int>();
    if (!j.contains("events"))
      throw std::runtime_error("script: object form needs an events array");
    events = &j.at("events");
  }
  if (!events->is_array())
    throw std::runtime_error("script: events must be an array");
  for (const auto& e : *events) {
    const std::string kind = e.at("event").get<std::string>();
    if (kind != "quit" && kind != "join")
      throw std::runtime_error("script: event must be quit or join");
    s.events.push_back(
        FleetEvent{e.at("t").get<int>(), kind == "join", e.at("uav").get<int>()});
  }
  return s;
}

inline nlohmann::json script_to_json(const EvalScript& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events)
    events.push_back({{"t", e.t},
                      {"event", e.join ? "join" : "quit"},
                      {"uav", e.uav}});
  if (s.initial_active.empty() && s.tail_steps == 0) return events;
  nlohmann::json j;
  j["events"] = std::move(events);
  if (!s.initial_active.empty()) j["initial_active"] = s.initial_active;
  if (s.tail_steps != 0) j["tail_steps"] = s.tail_steps;
  return j;
}

inline EvalScript read_event_script(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad script: " + e.what());
  }
  return script_from_json(j);
}

inline void write_event_script(const std::string& path, const EvalScript& s) {
  auto out = open_output(path);
  out << script_to_json(s).dump(2) << '\n';
}

}  // namespace ucn
