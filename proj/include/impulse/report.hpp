#pragma once

/**
 * @file report.hpp
 * @brief CSV and SVG emission. Numbers are rendered with 10 significant
 * digits so output is byte-stable for identical inputs.
 */

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "impulse/bifurcation.hpp"
#include "impulse/sim.hpp"

namespace impulse {

inline std::string fmt_num(double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr const char* kEventsHeader = "n,t,lambda,T,x1_pre,x2_pre,x3_pre,x1_post,x2_post,x3_post";
inline constexpr const char* kDenseHeader = "t,x1,x2,x3,ybar,y";
inline constexpr const char* kBifurcationHeader = "param,value,period,point_index,x1,x2,x3,saturated";

inline void write_events_csv(std::ostream& os, const SimTrace& trace) {
  os << kEventsHeader << '\n';
  for (const Event& e : trace.events) {
    os << e.n << ',' << fmt_num(e.t) << ',' << fmt_num(e.lambda) << ',' << fmt_num(e.period);
    for (int i = 0; i < 3; ++i) os << ',' << fmt_num(e.pre[i]);
    for (int i = 0; i < 3; ++i) os << ',' << fmt_num(e.post[i]);
    os << '\n';
  }
}

inline void write_dense_csv(std::ostream& os, const SimTrace& trace) {
  os << kDenseHeader << '\n';
  for (const Sample& s : trace.dense) {
    os << fmt_num(s.t) << ',' << fmt_num(s.x[0]) << ',' << fmt_num(s.x[1]) << ',' << fmt_num(s.x[2]) << ','
       << fmt_num(s.ybar) << ',' << fmt_num(s.y) << '\n';
  }
}

inline void write_bifurcation_csv(std::ostream& os, const BifurcationDiagram& diagram) {
  os << kBifurcationHeader << '\n';
  const std::string_view param = to_string(diagram.parameter);
  for (const auto& row : diagram.rows) {
    const std::string period = row.period ? std::to_string(*row.period) : std::string("aperiodic");
    for (std::size_t i = 0; i < row.points.size(); ++i) {
      const PeriodicPoint& p = row.points[i];
      os << param << ',' << fmt_num(row.value) << ',' << period << ',' << i << ',' << fmt_num(p.state[0]) << ','
         << fmt_num(p.state[1]) << ',' << fmt_num(p.state[2]) << ',' << (classify_saturation(p).any() ? 1 : 0)
         << '\n';
    }
  }
}

/// Two stacked panels: effect y(t) on top, concentration ybar(t) below.
inline void write_trace_svg(std::ostream& os, const SimTrace& trace) {
  constexpr double kWidth = 800.0;
  constexpr double kPanel = 260.0;
  constexpr double kMargin = 50.0;
  const double height = 2.0 * kPanel + 3.0 * kMargin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (trace.dense.empty()) {
    os << "</svg>\n";
    return;
  }
  const double t0 = trace.dense.front().t;
  const double t1 = std::max(trace.dense.back().t, t0 + 1e-9);
  auto panel = [&](double top, const char* label, const char* colour, auto value) {
    double lo = value(trace.dense.front());
    double hi = lo;
    for (const auto& s : trace.dense) {
      lo = std::min(lo, value(s));
      hi = std::max(hi, value(s));
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double plot_w = kWidth - 2.0 * kMargin;
    os << "<rect x=\"" << kMargin << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << kPanel
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kMargin << "\" y=\"" << top - 8 << "\" font-size=\"14\">" << label << "  ["
       << fmt_num(lo) << ", " << fmt_num(hi) << "]</text>\n";
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
    for (const auto& s : trace.dense) {
      const double x = kMargin + (s.t - t0) / (t1 - t0) * plot_w;
      const double y = top + kPanel - (value(s) - lo) / (hi - lo) * kPanel;
      os << fmt_num(x) << ',' << fmt_num(y) << ' ';
    }
    os << "\"/>\n";
  };
  panel(kMargin, "y(t) [%]", "steelblue", [](const Sample& s) { return s.y; });
  panel(2.0 * kMargin + kPanel, "ybar(t) [ug/ml]", "firebrick", [](const Sample& s) { return s.ybar; });
  os << "<text x=\"" << kMargin << "\" y=\"" << height - 10 << "\" font-size=\"12\">t: " << fmt_num(t0) << " .. "
     << fmt_num(t1) << " min</text>\n";
  os << "</svg>\n";
}

}  // namespace impulse
