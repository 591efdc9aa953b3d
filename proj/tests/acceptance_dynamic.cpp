#include <catch2/catch_amalgamated.hpp>

#include <cstdarg>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "ucn/config.hpp"
#include "ucn/ducm2.hpp"
#include "ucn/oracle.hpp"
#include "ucn/suite.hpp"

using namespace ucn;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// Dynamic-fleet training on the small-scale study scenario: up to 3 vehicles,
// 90-step episodes, quits every 2(M-1)=12 steps during even episodes.
RunConfig dyn_config() {
  RunConfig c;
  c.grid = GridSpec{7, 100.0};
  c.n_users = 40;
  c.n_hotspots = 2;
  c.hotspot_radius_m = 100.0;
  c.p_hot = 0.8;
  c.layout_seed = 7;
  c.n_uavs = 3;
  c.episodes = 1000;
  c.ducm2_steps = 90;
  c.quit_interval = 12;
  c.epsilon = 0.1;
  c.gamma = 0.95;
  c.lr = 7e-4;
  c.batch = 128;
  c.replay_capacity = 60000;
  c.target_update = 10;
  c.hidden = {64, 64};
  c.seed = 3;
  return c;
}

Ducm2Trainer& dyn_trainer() {
  static Ducm2Trainer* tr = nullptr;
  if (!tr) {
    const RunConfig c = dyn_config();
    tr = new Ducm2Trainer(make_scenario(c), make_copy2_layout(c),
                          make_ducm2_config(c));
    tr->train([](const EpisodeMetrics&) {});
  }
  return *tr;
}

int dyn_oracle(int k) {
  static std::map<int, int> cache;
  const auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  const Scenario& sc = dyn_trainer().scenario();
  const int best =
      brute_force_placement(k, sc.grid, sc.users.active(0), sc.channel)
          .best_connected;
  cache[k] = best;
  return best;
}

}  // namespace

TEST_CASE("criterion 9: quit sequences stay near the per-size optimum") {
  Ducm2Trainer& tr = dyn_trainer();
  const auto cases =
      make_quits_exhaustive(tr.scenario().n_uavs, tr.config().quit_interval);
  const auto rows = run_suite(tr.agents(), tr.scenario(), tr.config(), cases);

  int within = 0;
  std::ostringstream worst;
  for (const auto& r : rows) {
    const int best = dyn_oracle(r.active_count);
    if (static_cast<double>(r.connected) >= 0.85 * best)
      ++within;
    else
      worst << " " << r.script_id << "/phase" << r.phase << "="
            << r.connected << "(best " << best << ")";
  }
  const double frac =
      static_cast<double>(within) / static_cast<double>(rows.size());
  const bool pass = frac >= 0.9;
  std::string misses = worst.str();
  if (misses.empty()) misses = " none";
  report_criterion(
      9, pass,
      fmt("%d/%zu (order,phase) cases within 15%% of best {1:%d 2:%d 3:%d}; "
          "misses:%s",
          within, rows.size(), dyn_oracle(1), dyn_oracle(2), dyn_oracle(3),
          misses.c_str()));
  REQUIRE(pass);
}

TEST_CASE("criterion 10: final connectivity is start-position independent") {
  Ducm2Trainer& tr = dyn_trainer();
  const int m = tr.scenario().grid.m;
  Rng rng(4242);
  EvalScript script;     // no fleet changes; just run the full fleet
  script.tail_steps = 24;  // enough steps to cross the grid from any corner

  std::vector<int> finals;
  std::ostringstream detail;
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<std::pair<int, int>> starts;
    for (int g : rng.sample_indices(m * m, tr.scenario().n_uavs))
      starts.emplace_back(g / m, g % m);
    const DynamicEval ev = eval_dynamic(tr, script, starts);
    finals.push_back(ev.connected_per_step.back());
    detail << " start" << rep << "=";
    for (const auto& [x, y] : starts) detail << "(" << x << "," << y << ")";
    detail << "->" << finals.back();
  }
  const bool pass =
      finals[0] > 0 && finals[0] == finals[1] && finals[1] == finals[2];
  report_criterion(
      10, pass,
      fmt("greedy rollouts from 3 random start sets;%s", detail.str().c_str()));
  REQUIRE(pass);
}
