// Minimal SVG line charts (no external dependencies): used to render
// training curves from metrics CSV files.

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucn/io.hpp"

namespace ucn {

struct Series {
  std::string name;
  std::vector<double> ys;  // x is the index (0-based)
};

namespace detail {

inline std::string svg_color(std::size_t i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

// A "nice" tick step close to range/target_ticks (1/2/5 times a power of 10).
inline double nice_step(double range, int target_ticks) {
  if (range <= 0.0) return 1.0;
  const double raw = range / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0)
    step = 1.0;
  else if (frac <= 2.0)
    step = 2.0;
  else if (frac <= 5.0)
    step = 5.0;
  return step * mag;
}

inline std::string trim_number(double v) {
  std::string s = fmt_g(v);
  return s;
}

}  // namespace detail

// Renders the series as polylines on a fixed 800x500 canvas with axes,
// ticks, and a legend. All series share the x axis (sample index).
inline std::string render_line_chart(const std::vector<Series>& series,
                                     const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label) {
  if (series.empty()) throw std::invalid_argument("chart: no series");
  std::size_t n = 0;
  double y_min = 0.0, y_max = 1.0;
  bool have = false;
  for (const auto& s : series) {
    n = std::max(n, s.ys.size());
    for (double v : s.ys) {
      if (!std::isfinite(v)) continue;
      if (!have) {
        y_min = y_max = v;
        have = true;
      } else {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  }
  if (n == 0) throw std::invalid_argument("chart: empty series");
  if (!have) {
    y_min = 0.0;
    y_max = 1.0;
  }
  if (y_max == y_min) {
    y_max += 0.5;
    y_min -= 0.5;
  }

  const double width = 800.0, height = 500.0;
  const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 55.0;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double x_max = static_cast<double>(n > 1 ? n - 1 : 1);

  const auto px = [&](double x) { return ml + x / x_max * pw; };
  const auto py = [&](double y) {
    return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";

  // Axes.
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";

  // X ticks.
  const double xs = detail::nice_step(x_max, 8);
  for (double x = 0.0; x <= x_max + 1e-9; x += xs) {
    const double cx = px(x);
    out << "<line x1=\"" << cx << "\" y1=\"" << mt + ph << "\" x2=\"" << cx
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << cx << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << detail::trim_number(x) << "</text>\n";
  }
  // Y ticks.
  const double ys = detail::nice_step(y_max - y_min, 6);
  const double y0 = std::ceil(y_min / ys) * ys;
  for (double y = y0; y <= y_max + 1e-9 * ys; y += ys) {
    const double cy = py(y);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << cy << "\" x2=\"" << ml
        << "\" y2=\"" << cy << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << cy << "\" x2=\"" << ml + pw
        << "\" y2=\"" << cy << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ml - 9 << "\" y=\"" << cy + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << detail::trim_number(y) << "</text>\n";
  }

  // Axis labels.
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">"
      << y_label << "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    out << "<polyline fill=\"none\" stroke=\"" << detail::svg_color(si)
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      if (!std::isfinite(s.ys[i])) continue;
      out << px(static_cast<double>(i)) << ',' << py(s.ys[i]) << ' ';
    }
    out << "\"/>\n";
  }

  // Legend.
  double ly = mt + 10;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double lx = ml + pw - 150;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24
        << "\" y2=\"" << ly << "\" stroke=\"" << detail::svg_color(si)
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[si].name
        << "</text>\n";
    ly += 18;
  }

  out << "</svg>\n";
  return out.str();
}

inline void write_line_chart(const std::string& path,
                             const std::vector<Series>& series,
                             const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label) {
  auto out = open_output(path);
  out << render_line_chart(series, title, x_label, y_label);
}

}  // namespace ucn
