// Episode metrics CSV. The schema is fixed; wall_ms stays 0 unless timing
// is switched on, so the file is byte-reproducible under a fixed seed.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucn/agent.hpp"
#include "ucn/io.hpp"

namespace ucn {

inline constexpr const char* kMetricsHeader =
    "episode,kind,accumulated_connected,mean_reward,mean_loss,wall_ms";

struct MetricsRow {
  int episode = 0;
  std::string kind;
  long long accumulated_connected = 0;
  double mean_reward = 0.0;
  double mean_loss = 0.0;
  long long wall_ms = 0;
};

inline MetricsRow to_metrics_row(const EpisodeMetrics& m,
                                 long long wall_ms = 0) {
  return MetricsRow{m.episode, m.kind, m.accumulated_connected, m.mean_reward,
                    m.mean_loss, wall_ms};
}

inline std::string format_metrics_row(const MetricsRow& r) {
  std::ostringstream os;
  os << r.episode << ',' << r.kind << ',' << r.accumulated_connected << ','
     << fmt_g(r.mean_reward) << ',' << fmt_g(r.mean_loss) << ',' << r.wall_ms;
  return os.str();
}

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path, bool append = false) {
    const bool fresh = !append || !std::ifstream(path).good();
    out_.open(path, append ? std::ios::app : std::ios::out);
    if (!out_) throw std::runtime_error("cannot write " + path);
    if (fresh) out_ << kMetricsHeader << '\n';
  }

  void append(const MetricsRow& r) {
    out_ << format_metrics_row(r) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

inline std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw std::runtime_error(path + ": unexpected metrics header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[6];
    for (int i = 0; i < 6; ++i)
      if (!std::getline(ls, f[i], i == 5 ? '\n' : ','))
        throw std::runtime_error(path + ": malformed row: " + line);
    rows.push_back(MetricsRow{std::stoi(f[0]), f[1], std::stoll(f[2]),
                              std::stod(f[3]), std::stod(f[4]),
                              std::stoll(f[5])});
  }
  return rows;
}

}  // namespace ucn
