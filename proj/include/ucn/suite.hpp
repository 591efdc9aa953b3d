// Scripted evaluation batteries for trained fleets: exhaustive quit orders,
// an exhaustive set of mixed quit/join size-paths with randomized ids, and
// the summary report comparing every (script, phase) against exhaustive
// placement for the same active count.

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucn/ducm2.hpp"
#include "ucn/io.hpp"
#include "ucn/rng.hpp"

namespace ucn {

struct SuiteCase {
  std::string script_id;
  EvalScript script;
};

struct SuiteRow {
  std::string script_id;
  int phase = 0;
  int active_count = 0;
  int connected = 0;
};

// Every ordering of the fleet, the first n-1 entries quitting in turn at
// t = interval, 2*interval, ...; the last entry keeps flying alone.
inline std::vector<SuiteCase> make_quits_exhaustive(int n_max,
                                                    int quit_interval) {
  if (n_max < 2 || n_max > 9)
    throw std::invalid_argument("quits-exhaustive: fleet size must be 2..9");
  if (quit_interval < 1)
    throw std::invalid_argument("quits-exhaustive: interval must be positive");
  std::vector<int> perm(static_cast<std::size_t>(n_max));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SuiteCase> cases;
  do {
    SuiteCase c;
    std::string id = "quits-";
    for (int u : perm) id += static_cast<char>('0' + u);
    c.script_id = id;
    for (int k = 0; k + 1 < n_max; ++k)
      c.script.events.push_back(
          {(k + 1) * quit_interval, false, perm[static_cast<std::size_t>(k)]});
    cases.push_back(std::move(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cases;
}

// Every length-4 quit/join size-path that stays within [1, n_max], starting
// from (n_max+1)/2 active members. Which ids start active and which id each
// event touches are drawn from the supplied stream, so the same seed always
// produces the same battery.
inline std::vector<SuiteCase> make_mixed_random(int n_max, int quit_interval,
                                                Rng& rng) {
  if (n_max < 2)
    throw std::invalid_argument("mixed-random: fleet size must be >= 2");
  if (quit_interval < 1)
    throw std::invalid_argument("mixed-random: interval must be positive");
  const int s0 = (n_max + 1) / 2;
  std::vector<SuiteCase> cases;
  int serial = 0;
  for (unsigned mask = 0; mask < 16u; ++mask) {
    int s = s0;
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      s += (mask >> k) & 1u ? 1 : -1;
      if (s < 1 || s > n_max) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    SuiteCase c;
    {
      std::ostringstream id;
      id << "mixed-";
      if (serial < 10) id << '0';
      id << serial;
      c.script_id = id.str();
    }
    ++serial;
    c.script.initial_active = rng.sample_indices(n_max, s0);
    std::vector<int> active = c.script.initial_active;
    for (int k = 0; k < 4; ++k) {
      const bool join = ((mask >> k) & 1u) != 0;
      FleetEvent ev;
      ev.t = (k + 1) * quit_interval;
      ev.join = join;
      if (join) {
        std::vector<int> inactive;
        for (int u = 0; u < n_max; ++u)
          if (std::find(active.begin(), active.end(), u) == active.end())
            inactive.push_back(u);
        ev.uav = inactive[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(inactive.size())))];
        active.push_back(ev.uav);
      } else {
        const auto idx = static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(active.size())));
        ev.uav = active[idx];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
      }
      c.script.events.push_back(ev);
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

inline std::vector<SuiteCase> make_suite(const std::string& name, int n_max,
                                         int quit_interval, Rng& rng) {
  if (name == "quits-exhaustive")
    return make_quits_exhaustive(n_max, quit_interval);
  if (name == "mixed-random") return make_mixed_random(n_max, quit_interval, rng);
  throw std::invalid_argument("unknown suite: " + name +
                              " (expected quits-exhaustive or mixed-random)");
}

inline std::vector<SuiteRow> run_suite(const std::vector<Agent>& agents,
                                       const Scenario& sc,
                                       const Ducm2Config& cfg,
                                       const std::vector<SuiteCase>& cases) {
  std::vector<SuiteRow> rows;
  for (const auto& c : cases) {
    const DynamicEval ev = eval_dynamic(agents, sc, cfg, c.script);
    for (const auto& ph : ev.phases)
      rows.push_back({c.script_id, ph.phase, ph.active_count, ph.connected});
  }
  return rows;
}

struct SuiteReport {
  // connected-value histogram per active count: count -> (connected -> rows)
  std::map<int, std::map<int, int>> histogram;
  std::map<int, int> oracle;   // active count -> best achievable connected
  std::map<int, int> within;   // active count -> rows within 10% of oracle
  std::map<int, int> total;    // active count -> rows
  int rows_within = 0;
  int rows_total = 0;
  double fraction_within = 0.0;
};

// A row counts as "within" when connected >= 0.9 * best for its active count.
inline SuiteReport suite_report(const std::vector<SuiteRow>& rows,
                                const std::map<int, int>& oracle_by_count) {
  SuiteReport rep;
  rep.oracle = oracle_by_count;
  for (const auto& r : rows) {
    const auto it = oracle_by_count.find(r.active_count);
    if (it == oracle_by_count.end())
      throw std::invalid_argument(
          "suite report: no reference value for active count " +
          std::to_string(r.active_count));
    rep.histogram[r.active_count][r.connected] += 1;
    rep.total[r.active_count] += 1;
    ++rep.rows_total;
    if (static_cast<double>(r.connected) >= 0.9 * it->second) {
      rep.within[r.active_count] += 1;
      ++rep.rows_within;
    }
  }
  rep.fraction_within =
      rep.rows_total ? static_cast<double>(rep.rows_within) / rep.rows_total
                     : 0.0;
  return rep;
}

inline std::string report_table(const SuiteReport& rep) {
  std::ostringstream out;
  for (const auto& [count, hist] : rep.histogram) {
    const int tot = rep.total.at(count);
    const int win = rep.within.count(count) ? rep.within.at(count) : 0;
    out << "active=" << count << " best=" << rep.oracle.at(count)
        << " rows=" << tot << " within10%=" << win << " ("
        << fmt_g(100.0 * win / tot) << "%)\n";
    out << "  connected:";
    for (const auto& [val, n] : hist) out << ' ' << val << "x" << n;
    out << '\n';
  }
  out << "overall: " << rep.rows_within << "/" << rep.rows_total
      << " phases within 10% of best (" << fmt_g(100.0 * rep.fraction_within)
      << "%)\n";
  return out.str();
}

inline void write_suite_csv(const std::string& path,
                            const std::vector<SuiteRow>& rows,
                            std::uint64_t seed,
                            const std::string& config_hash) {
  auto out = open_output(path);
  out << "script_id,phase,active_count,connected,seed,config_hash\n";
  for (const auto& r : rows)
    out << r.script_id << ',' << r.phase << ',' << r.active_count << ','
        << r.connected << ',' << seed << ',' << config_hash << '\n';
}

}  // namespace ucn
