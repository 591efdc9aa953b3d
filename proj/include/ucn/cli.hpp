// Command-line front end: training runs, checkpoint evaluation, exhaustive
// placement search, scripted suites, and SVG plots. Every subcommand writes
// plain artifacts (JSON/CSV/SVG) so runs can be reproduced and inspected
// offline.

#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucn/checkpoint.hpp"
#include "ucn/config.hpp"
#include "ucn/metrics.hpp"
#include "ucn/oracle.hpp"
#include "ucn/suite.hpp"
#include "ucn/svg.hpp"

namespace ucn {
namespace detail {

inline void apply_seed_overrides(RunConfig& c, bool cli_seed_set,
                                 std::uint64_t cli_seed) {
  if (const char* env = std::getenv("UCN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw std::runtime_error("UCN_SEED must be an unsigned integer");
    c.seed = v;
  }
  if (cli_seed_set) c.seed = cli_seed;  // command line beats environment
}

inline std::string checkpoint_name(int episode) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "checkpoint_ep%04d.json", episode);
  return buf;
}

inline std::vector<std::pair<int, int>> parse_xy_arg(const std::string& arg) {
  std::vector<std::pair<int, int>> out;
  std::istringstream in(arg);
  std::string item;
  while (std::getline(in, item, ';')) {
    int x = 0, y = 0;
    char comma = 0;
    std::istringstream p(item);
    if (!(p >> x >> comma >> y) || comma != ',')
      throw std::runtime_error("positions must look like \"x,y;x,y\"");
    out.emplace_back(x, y);
  }
  if (out.empty()) throw std::runtime_error("empty position list");
  return out;
}

struct TrainArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string resume;
  std::optional<int> level;
  std::optional<int> episodes;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

// Shared episode loop: appends one metrics row per episode, saves periodic
// snapshots, then a final checkpoint.
template <class Trainer>
void run_training(Trainer& tr, const RunConfig& c, int n_episodes,
                  const std::string& hash, const std::string& out_dir,
                  bool resumed) {
  MetricsWriter mw(out_dir + "/metrics.csv", resumed);
  while (tr.episodes_done() < n_episodes) {
    const auto t0 = std::chrono::steady_clock::now();
    const EpisodeMetrics m = tr.run_episode();
    long long wall = 0;
    if (c.timing)
      wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
    mw.append(to_metrics_row(m, wall));
    if (c.checkpoint_every > 0 && m.episode % c.checkpoint_every == 0)
      save_checkpoint(out_dir + "/" + checkpoint_name(m.episode), tr, hash);
  }
  save_checkpoint(out_dir + "/checkpoint.json", tr, hash);
}

inline int cmd_train_ducm1(const TrainArgs& a) {
  RunConfig c = load_run_config(a.config_path);
  if (a.level) c.level = *a.level;
  if (a.episodes) c.episodes = *a.episodes;
  apply_seed_overrides(c, a.seed_set, a.seed);
  const Scenario sc = make_scenario(c);
  const Ducm1Config dc = make_ducm1_config(c, sc);
  dc.validate();
  const std::string hash = config_hash(c);
  std::filesystem::create_directories(a.out_dir);
  save_run_config(a.out_dir + "/config.json", c);
  Ducm1Trainer tr(sc, dc);
  const bool resumed = !a.resume.empty();
  if (resumed) load_checkpoint(a.resume, tr, hash);
  run_training(tr, c, dc.n_episodes, hash, a.out_dir, resumed);
  std::cout << "trained " << tr.episodes_done() << " episodes (level "
            << dc.level << ", seed " << c.seed << "); artifacts in "
            << a.out_dir << "\n";
  return 0;
}

inline int cmd_train_ducm2(const TrainArgs& a) {
  RunConfig c = load_run_config(a.config_path);
  if (a.episodes) c.episodes = *a.episodes;
  apply_seed_overrides(c, a.seed_set, a.seed);
  const Scenario sc = make_scenario(c);
  const Ducm2Config dc = make_ducm2_config(c);
  dc.validate(sc.n_uavs, sc.grid);
  const std::string hash = config_hash(c);
  std::filesystem::create_directories(a.out_dir);
  save_run_config(a.out_dir + "/config.json", c);
  Ducm2Trainer tr(sc, make_copy2_layout(c), dc);
  const bool resumed = !a.resume.empty();
  if (resumed) load_checkpoint(a.resume, tr, hash);
  run_training(tr, c, dc.n_episodes, hash, a.out_dir, resumed);
  std::cout << "trained " << tr.episodes_done() << " episodes (seed " << c.seed
            << "); artifacts in " << a.out_dir << "\n";
  return 0;
}

struct EvalArgs {
  std::string checkpoint_path;
  std::string config_path;
  std::string script_path;
  std::string out_path;
  std::string initial;
  std::optional<int> steps;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

inline void emit_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    auto out = open_output(out_path);
    out << j.dump(2) << "\n";
  }
}

inline int cmd_eval(const EvalArgs& a) {
  RunConfig c = load_run_config(a.config_path);
  apply_seed_overrides(c, a.seed_set, a.seed);
  const Scenario sc = make_scenario(c);
  const std::string hash = config_hash(c);
  const nlohmann::json ck = read_checkpoint_file(a.checkpoint_path);
  const std::string algo = checkpoint_algo(ck);
  std::vector<std::pair<int, int>> starts;
  if (!a.initial.empty()) starts = parse_xy_arg(a.initial);

  nlohmann::json result;
  result["algo"] = algo;
  if (algo == "ducm1") {
    const Ducm1Config dc = make_ducm1_config(c, sc);
    Ducm1Trainer tr(sc, dc);
    tr.set_episodes_done(restore_checkpoint(ck, hash, tr.agents()));
    const int steps = a.steps ? *a.steps : dc.steps;
    const Rollout roll =
        greedy_rollout(tr, starts.empty() ? sc.initial_xy : starts, steps);
    result["connected_per_step"] = roll.connected;
    result["final_connected"] = roll.connected.back();
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& u : roll.positions.back())
      pos.push_back({u.x_idx, u.y_idx});
    result["final_positions"] = std::move(pos);
  } else if (algo == "ducm2") {
    const Ducm2Config dc = make_ducm2_config(c);
    Ducm2Trainer tr(sc, make_copy2_layout(c), dc);
    tr.set_episodes_done(
        restore_checkpoint(ck, hash, tr.agents(), &tr.plan_rng()));
    EvalScript script;
    if (!a.script_path.empty()) script = read_event_script(a.script_path);
    const DynamicEval ev = eval_dynamic(tr, script, starts);
    nlohmann::json phases = nlohmann::json::array();
    for (const auto& p : ev.phases)
      phases.push_back({{"phase", p.phase},
                        {"active_count", p.active_count},
                        {"connected", p.connected}});
    result["phases"] = std::move(phases);
    result["connected_per_step"] = ev.connected_per_step;
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& u : ev.positions.back())
      if (u.alive) pos.push_back({u.x_idx, u.y_idx});
    result["final_positions"] = std::move(pos);
  } else {
    throw std::runtime_error("checkpoint: unknown algorithm \"" + algo + "\"");
  }
  emit_json(result, a.out_path);
  return 0;
}

struct OracleArgs {
  int k = 1;
  std::string config_path;
  std::string users_csv;
  int grid_m = 0;
  long long budget = 100000000;
  std::string out_path;
};

inline int cmd_oracle(const OracleArgs& a) {
  GridSpec grid;
  ChannelParams params;
  std::vector<Vec2> users;
  if (!a.config_path.empty()) {
    const RunConfig c = load_run_config(a.config_path);
    grid = c.grid;
    params = c.channel;
    if (!a.users_csv.empty())
      users = read_layout_csv(a.users_csv);
    else
      users = make_user_layout(c).active(0);
  } else {
    if (a.users_csv.empty() || a.grid_m == 0)
      throw std::runtime_error(
          "oracle: pass --config, or both --grid and --users");
    grid.m = a.grid_m;
    users = read_layout_csv(a.users_csv);
  }
  const OracleResult res =
      brute_force_placement(a.k, grid, users, params, a.budget);
  nlohmann::json j;
  j["k"] = a.k;
  j["evaluated"] = res.evaluated;
  j["best_connected"] = res.best_connected;
  nlohmann::json pos = nlohmann::json::array();
  for (const auto& [x, y] : res.best_xy) pos.push_back({x, y});
  j["best_positions"] = std::move(pos);
  emit_json(j, a.out_path);
  return 0;
}

struct SuiteArgs {
  std::string name;
  std::string config_path;
  std::string checkpoint_path;
  std::string out_dir = "out";
  long long budget = 100000000;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

inline int cmd_suite(const SuiteArgs& a) {
  RunConfig c = load_run_config(a.config_path);
  apply_seed_overrides(c, a.seed_set, a.seed);
  const Scenario sc = make_scenario(c);
  const Ducm2Config dc = make_ducm2_config(c);
  dc.validate(sc.n_uavs, sc.grid);
  const std::string hash = config_hash(c);
  Ducm2Trainer tr(sc, make_copy2_layout(c), dc);
  load_checkpoint(a.checkpoint_path, tr, hash);

  Rng rng = Rng(c.seed).derive("suite");
  const auto cases = make_suite(a.name, sc.n_uavs, dc.quit_interval, rng);
  const auto rows = run_suite(tr.agents(), sc, dc, cases);

  if (sc.users.schedule.size() > 1)
    throw std::runtime_error(
        "suite: reference placement needs a single user layout");
  const auto& users = sc.users.active(0);
  std::map<int, int> oracle;
  for (const auto& r : rows)
    if (!oracle.count(r.active_count))
      oracle[r.active_count] =
          brute_force_placement(r.active_count, sc.grid, users, sc.channel,
                                a.budget)
              .best_connected;

  const SuiteReport rep = suite_report(rows, oracle);
  std::filesystem::create_directories(a.out_dir);
  write_suite_csv(a.out_dir + "/suite.csv", rows, c.seed, hash);
  const std::string table = report_table(rep);
  {
    auto out = open_output(a.out_dir + "/report.txt");
    out << table;
  }
  std::cout << table;
  return 0;
}

struct PlotArgs {
  std::string metrics_path;
  std::string out_path;
  std::string column = "accumulated_connected";
};

inline int cmd_plot(const PlotArgs& a) {
  const auto rows = read_metrics_csv(a.metrics_path);
  if (rows.empty()) throw std::runtime_error("plot: no metrics rows");
  const auto value = [&](const MetricsRow& r) -> double {
    if (a.column == "accumulated_connected")
      return static_cast<double>(r.accumulated_connected);
    if (a.column == "mean_reward") return r.mean_reward;
    if (a.column == "mean_loss") return r.mean_loss;
    if (a.column == "wall_ms") return static_cast<double>(r.wall_ms);
    throw std::runtime_error("plot: unknown column " + a.column);
  };
  // One series per episode kind so alternating-kind runs plot separately.
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, fresh] = index.try_emplace(r.kind, series.size());
    if (fresh) series.push_back(Series{r.kind, {}});
    series[it->second].ys.push_back(value(r));
  }
  write_line_chart(a.out_path, series, a.column, "episode", a.column);
  std::cout << "wrote " << a.out_path << "\n";
  return 0;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"UAV connectivity training and evaluation"};
  app.require_subcommand(1);

  detail::TrainArgs t1, t2;
  detail::EvalArgs ev;
  detail::OracleArgs orc;
  detail::SuiteArgs su;
  detail::PlotArgs pl;
  int t1_level = 0, t1_eps = 0, t2_eps = 0, ev_steps = 0;

  auto* c1 = app.add_subcommand("train-ducm1", "train a fixed-fleet policy");
  c1->add_option("--config", t1.config_path, "run config (JSON)")->required();
  auto* o_level = c1->add_option("--level", t1_level, "information level 1-4");
  auto* o_eps1 = c1->add_option("--episodes", t1_eps, "episode count override");
  auto* o_seed1 = c1->add_option("--seed", t1.seed, "seed override");
  c1->add_option("--out", t1.out_dir, "output directory");
  c1->add_option("--resume", t1.resume, "checkpoint to resume from");

  auto* c2 = app.add_subcommand("train-ducm2", "train a dynamic-fleet policy");
  c2->add_option("--config", t2.config_path, "run config (JSON)")->required();
  auto* o_eps2 = c2->add_option("--episodes", t2_eps, "episode count override");
  auto* o_seed2 = c2->add_option("--seed", t2.seed, "seed override");
  c2->add_option("--out", t2.out_dir, "output directory");
  c2->add_option("--resume", t2.resume, "checkpoint to resume from");

  auto* c3 = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  c3->add_option("--checkpoint", ev.checkpoint_path, "checkpoint (JSON)")
      ->required();
  c3->add_option("--config", ev.config_path, "run config (JSON)")->required();
  c3->add_option("--script", ev.script_path, "fleet-change script (JSON)");
  c3->add_option("--out", ev.out_path, "result JSON (default: stdout)");
  c3->add_option("--initial", ev.initial, "start positions \"x,y;x,y\"");
  auto* o_steps = c3->add_option("--steps", ev_steps, "rollout length");
  auto* o_seed3 = c3->add_option("--seed", ev.seed, "seed override");

  auto* c4 = app.add_subcommand("oracle", "exhaustive placement search");
  c4->add_option("--k", orc.k, "number of placements")->required();
  c4->add_option("--config", orc.config_path, "run config (JSON)");
  c4->add_option("--grid", orc.grid_m, "grid size M (with --users)");
  c4->add_option("--users", orc.users_csv, "user layout CSV");
  c4->add_option("--budget", orc.budget, "max candidate tuples");
  c4->add_option("--out", orc.out_path, "result JSON (default: stdout)");

  auto* c5 = app.add_subcommand("suite", "run a named evaluation battery");
  c5->add_option("name", su.name, "quits-exhaustive | mixed-random")
      ->required();
  c5->add_option("--config", su.config_path, "run config (JSON)")->required();
  c5->add_option("--checkpoint", su.checkpoint_path, "trained policy")
      ->required();
  c5->add_option("--out", su.out_dir, "output directory");
  c5->add_option("--budget", su.budget, "max candidate tuples per reference");
  auto* o_seed5 = c5->add_option("--seed", su.seed, "seed override");

  auto* c6 = app.add_subcommand("plot", "render metrics as an SVG chart");
  c6->add_option("--metrics", pl.metrics_path, "metrics CSV")->required();
  c6->add_option("--out", pl.out_path, "output SVG")->required();
  c6->add_option("--column", pl.column,
                 "metrics column (default accumulated_connected)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c1->parsed()) {
      if (o_level->count()) t1.level = t1_level;
      if (o_eps1->count()) t1.episodes = t1_eps;
      t1.seed_set = o_seed1->count() > 0;
      return detail::cmd_train_ducm1(t1);
    }
    if (c2->parsed()) {
      if (o_eps2->count()) t2.episodes = t2_eps;
      t2.seed_set = o_seed2->count() > 0;
      return detail::cmd_train_ducm2(t2);
    }
    if (c3->parsed()) {
      if (o_steps->count()) ev.steps = ev_steps;
      ev.seed_set = o_seed3->count() > 0;
      return detail::cmd_eval(ev);
    }
    if (c4->parsed()) return detail::cmd_oracle(orc);
    if (c5->parsed()) {
      su.seed_set = o_seed5->count() > 0;
      return detail::cmd_suite(su);
    }
    if (c6->parsed()) return detail::cmd_plot(pl);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ucn");
  for (const auto& s : args) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ucn
