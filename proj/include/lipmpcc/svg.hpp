// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_SVG_HPP
#define LIPMPCC_SVG_HPP

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lipmpcc/simulator.hpp"

namespace lipmpcc {
namespace svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool line = true;
};

namespace detail {

struct Mapper {
  double xmin, xmax, ymin, ymax;
  double px0, px1, py0, py1; // pixel box; py0 is the top
  double px(double x) const {
    return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0);
  }
  double py(double y) const {
    return py1 - (y - ymin) / (ymax - ymin) * (py1 - py0);
  }
};

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

} // namespace detail

/// Minimal static line/scatter chart. equal_axes keeps meters square for
/// trajectory views.
inline void write_chart(const std::string& filename, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<Series>& series,
                        bool equal_axes = false) {
  const double W = 720, H = 520;
  detail::Mapper m;
  m.px0 = 70;
  m.px1 = W - 30;
  m.py0 = 50;
  m.py1 = H - 60;
  m.xmin = m.ymin = std::numeric_limits<double>::infinity();
  m.xmax = m.ymax = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    for (double v : s.x) {
      m.xmin = std::min(m.xmin, v);
      m.xmax = std::max(m.xmax, v);
    }
    for (double v : s.y) {
      m.ymin = std::min(m.ymin, v);
      m.ymax = std::max(m.ymax, v);
    }
  }
  if (!std::isfinite(m.xmin)) {
    m.xmin = 0;
    m.xmax = 1;
    m.ymin = 0;
    m.ymax = 1;
  }
  auto pad = [](double& lo, double& hi) {
    const double p = std::max(1e-9, 0.05 * (hi - lo));
    lo -= p;
    hi += p;
  };
  pad(m.xmin, m.xmax);
  pad(m.ymin, m.ymax);
  if (equal_axes) {
    const double sx = (m.xmax - m.xmin) / (m.px1 - m.px0);
    const double sy = (m.ymax - m.ymin) / (m.py1 - m.py0);
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (m.xmin + m.xmax), cy = 0.5 * (m.ymin + m.ymax);
    m.xmin = cx - 0.5 * s * (m.px1 - m.px0);
    m.xmax = cx + 0.5 * s * (m.px1 - m.px0);
    m.ymin = cy - 0.5 * s * (m.py1 - m.py0);
    m.ymax = cy + 0.5 * s * (m.py1 - m.py0);
  }

  std::ofstream f(filename);
  if (!f) throw std::runtime_error("cannot open " + filename);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes box and ticks
  f << "<rect x=\"" << m.px0 << "\" y=\"" << m.py0 << "\" width=\""
    << m.px1 - m.px0 << "\" height=\"" << m.py1 - m.py0
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int n_ticks = 6;
  for (int i = 0; i <= n_ticks; ++i) {
    const double xv = m.xmin + i * (m.xmax - m.xmin) / n_ticks;
    const double yv = m.ymin + i * (m.ymax - m.ymin) / n_ticks;
    f << "<line x1=\"" << m.px(xv) << "\" y1=\"" << m.py1 << "\" x2=\""
      << m.px(xv) << "\" y2=\"" << m.py1 + 5 << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << m.px(xv) << "\" y=\"" << m.py1 + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" << detail::fmt(xv) << "</text>\n";
    f << "<line x1=\"" << m.px0 - 5 << "\" y1=\"" << m.py(yv) << "\" x2=\""
      << m.px0 << "\" y2=\"" << m.py(yv) << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << m.px0 - 8 << "\" y=\"" << m.py(yv) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << detail::fmt(yv) << "</text>\n";
  }
  f << "<text x=\"" << (m.px0 + m.px1) / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\">" << x_label << "</text>\n";
  f << "<text x=\"18\" y=\"" << (m.py0 + m.py1) / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 18 " << (m.py0 + m.py1) / 2 << ")\">" << y_label
    << "</text>\n";

  // series
  double legend_y = m.py0 + 16;
  for (const Series& s : series) {
    if (s.line && s.x.size() >= 2) {
      f << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        f << m.px(s.x[i]) << "," << m.py(s.y[i]) << " ";
      }
      f << "\"/>\n";
    }
    if (s.markers) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        f << "<circle cx=\"" << m.px(s.x[i]) << "\" cy=\"" << m.py(s.y[i])
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      f << "<line x1=\"" << m.px1 - 150 << "\" y1=\"" << legend_y << "\" x2=\""
        << m.px1 - 125 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
      f << "<text x=\"" << m.px1 - 120 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
      legend_y += 18;
    }
  }
  f << "</svg>\n";
}

/// Reference path (red), COM trace (blue), and footstep markers.
inline void write_trajectory_svg(const std::string& filename, const Path& path,
                                 const std::vector<StepLog>& logs) {
  std::vector<Series> series;
  {
    Series ref;
    ref.label = "reference path";
    ref.color = "red";
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const Vec2 p = path.eval(i * path.theta_end() / n).point;
      ref.x.push_back(p.x());
      ref.y.push_back(p.y());
    }
    series.push_back(ref);
  }
  {
    Series com;
    com.label = "COM trace";
    com.color = "blue";
    Series feet;
    feet.label = "footsteps";
    feet.color = "black";
    feet.line = false;
    feet.markers = true;
    for (const StepLog& l : logs) {
      com.x.push_back(l.state.x);
      com.y.push_back(l.state.y);
      // foothold = COM - u in world frame
      feet.x.push_back(l.state.x - l.input.ux);
      feet.y.push_back(l.state.y - l.input.uy);
    }
    series.push_back(com);
    series.push_back(feet);
  }
  write_chart(filename, "trajectory", "x [m]", "y [m]", series, true);
}

inline void write_errors_svg(const std::string& filename,
                             const std::vector<StepLog>& logs) {
  Series ec{"contour error", "blue"}, el{"lag error", "green"},
      en{"cartesian norm", "red"};
  for (const StepLog& l : logs) {
    ec.x.push_back(l.k);
    ec.y.push_back(l.e_contour);
    el.x.push_back(l.k);
    el.y.push_back(l.e_lag);
    en.x.push_back(l.k);
    en.y.push_back(l.e_cart);
  }
  write_chart(filename, "tracking errors", "step", "error [m]", {ec, el, en});
}

inline void write_progress_svg(const std::string& filename,
                               const std::vector<StepLog>& logs,
                               double v_max) {
  Series va{"v_avg", "blue"}, vm{"v_max", "red"};
  for (const StepLog& l : logs) {
    va.x.push_back(l.k);
    va.y.push_back(l.v_avg);
    vm.x.push_back(l.k);
    vm.y.push_back(v_max);
  }
  write_chart(filename, "path parameter progress", "step", "v [m/step]",
              {va, vm});
}

} // namespace svg
} // namespace lipmpcc

#endif // LIPMPCC_SVG_HPP
