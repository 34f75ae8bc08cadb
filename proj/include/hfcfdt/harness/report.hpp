#pragma once

// CSV logs, metrics table and the SVG overlay for a comparison. All numbers
// go through locale-independent formatting so outputs are byte-stable.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hfcfdt/format.hpp"
#include "hfcfdt/harness/scenario.hpp"

namespace hfcfdt::harness {

inline constexpr const char* kTrajectoryHeader = "t,x,y,theta,v,phi,p_motor,v_servo,delta_motor,delta_servo";
inline constexpr const char* kMetricsHeader =
    "controller,final_position_error,final_heading_error,max_cross_track,time_to_park,collision,path_length,parked";

/// Record index as an exact decimal on the 0.1 s grid ("12.3").
inline std::string grid_time(std::size_t index) {
  return std::to_string(index / 10) + "." + std::to_string(index % 10);
}

inline void write_trajectory(std::ostream& out, const TrajectoryLog& log) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : log.rows) {
    out << grid_time(r.index);
    for (double v : {r.x, r.y, r.theta, r.v, r.phi, r.p_motor, r.v_servo, r.delta_motor, r.delta_servo}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

inline void write_metrics(std::ostream& out, const Comparison& cmp) {
  out << kMetricsHeader << '\n';
  for (Controller c : kAllControllers) {
    const Metrics& m = cmp[c].metrics;
    out << to_string(c) << ',' << format_double(m.final_position_error) << ',' << format_double(m.final_heading_error)
        << ',' << format_double(m.max_cross_track) << ',' << (m.time_to_park ? format_double(*m.time_to_park) : "")
        << ',' << (m.collision ? "true" : "false") << ',' << format_double(m.path_length) << ','
        << (m.parked ? "true" : "false") << '\n';
  }
}

namespace detail {

inline std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  return s == "-0.000" ? "0.000" : s;
}

struct SvgFrame {
  double x0, y1, scale, margin;
  double px(double x) const { return margin + (x - x0) * scale; }
  double py(double y) const { return margin + (y1 - y) * scale; }
};

inline void svg_rect(std::ostream& out, const SvgFrame& f, const OrientedRect& r, const char* style) {
  out << "  <polygon points=\"";
  const auto c = r.corners();
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << (i ? " " : "") << fixed(f.px(c[i].x)) << ',' << fixed(f.py(c[i].y));
  }
  out << "\" " << style << "/>\n";
}

}  // namespace detail

inline constexpr std::array<const char*, 3> kControllerColors = {"#d62728", "#1f77b4", "#2ca02c"};

/// Slots, reference path, and one polyline (plus 0.1 s sample dots) per
/// controller. Denser dots mean slower progress.
inline void write_overlay(std::ostream& out, const Scenario& sc, const Comparison& cmp) {
  double x0 = -0.5 * sc.geometry.slot_length, x1 = 2.0 * sc.geometry.slot_length;
  double y0 = -0.5, y1 = sc.start.y + 1.5;
  for (const auto& e : cmp.entries) {
    for (const auto& r : e.log.rows) {
      x0 = std::min(x0, r.x - 1.0);
      x1 = std::max(x1, r.x + 1.0);
      y0 = std::min(y0, r.y - 1.0);
      y1 = std::max(y1, r.y + 1.0);
    }
  }
  const detail::SvgFrame f{x0, y1, 60.0, 20.0};
  const double w = 2.0 * f.margin + (x1 - x0) * f.scale;
  const double h = 2.0 * f.margin + (y1 - y0) * f.scale + 70.0;
  using detail::fixed;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w) << "\" height=\"" << fixed(h)
      << "\" viewBox=\"0 0 " << fixed(w) << ' ' << fixed(h) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << fixed(w) << "\" height=\"" << fixed(h) << "\" fill=\"white\"/>\n";
  detail::svg_rect(out, f, sc.rear_neighbor, "fill=\"#dddddd\" stroke=\"#555555\" stroke-width=\"1\"");
  detail::svg_rect(out, f, sc.front_neighbor, "fill=\"#dddddd\" stroke=\"#555555\" stroke-width=\"1\"");
  detail::svg_rect(out, f, sc.slot, "fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
  detail::svg_rect(out, f, sc.body.at(sc.target.x, sc.target.y, sc.target.theta),
                   "fill=\"none\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"2 2\"");

  out << "  <polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\" points=\"";
  bool first = true;
  for (const Vec2& p : sc.path.points()) {
    out << (first ? "" : " ") << fixed(f.px(p.x)) << ',' << fixed(f.py(p.y));
    first = false;
  }
  out << "\"/>\n";

  for (std::size_t i = 0; i < kAllControllers.size(); ++i) {
    const auto& rows = cmp.entries[i].log.rows;
    out << "  <g id=\"" << to_string(kAllControllers[i]) << "\" stroke=\"" << kControllerColors[i]
        << "\" fill=\"" << kControllerColors[i] << "\">\n";
    out << "    <polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out << (k ? " " : "") << fixed(f.px(rows[k].x)) << ',' << fixed(f.py(rows[k].y));
    }
    out << "\"/>\n";
    for (const auto& r : rows) {
      out << "    <circle cx=\"" << fixed(f.px(r.x)) << "\" cy=\"" << fixed(f.py(r.y)) << "\" r=\"1.2\" stroke=\"none\"/>\n";
    }
    out << "  </g>\n";
  }

  const double ly = h - 60.0;
  for (std::size_t i = 0; i < kAllControllers.size(); ++i) {
    const Metrics& m = cmp.entries[i].metrics;
    std::string label = std::string(to_string(kAllControllers[i])) + ": error " + fixed(m.final_position_error) +
                        " m" + (m.collision ? ", collision" : "") +
                        (m.time_to_park ? ", parked at " + fixed(*m.time_to_park) + " s" : "");
    out << "  <text x=\"" << fixed(f.margin) << "\" y=\"" << fixed(ly + 18.0 * static_cast<double>(i))
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" << kControllerColors[i] << "\">" << label
        << "</text>\n";
  }
  out << "</svg>\n";
}

namespace detail {

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  fn(out);
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline void save_trajectory(const TrajectoryLog& log, const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& o) { write_trajectory(o, log); });
}

/// fbos.csv, hfc.csv, hfcfdt.csv, metrics.csv, overlay.svg
inline void save_comparison(const Scenario& sc, const Comparison& cmp, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  for (Controller c : kAllControllers) save_trajectory(cmp[c].log, dir / (std::string(to_string(c)) + ".csv"));
  detail::write_file(dir / "metrics.csv", [&](std::ostream& o) { write_metrics(o, cmp); });
  detail::write_file(dir / "overlay.svg", [&](std::ostream& o) { write_overlay(o, sc, cmp); });
}

}  // namespace hfcfdt::harness
