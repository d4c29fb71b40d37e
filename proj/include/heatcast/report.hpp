#pragma once

// Prediction-vs-actual CSV and dependency-free SVG line charts.

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "heatcast/core_data.hpp"

namespace heatcast {

inline void write_prediction_csv(std::ostream& out, const std::vector<Timestamp>& times,
                                 const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
  out << "timestamp,actual_kw,predicted_kw\n";
  char buf[64];
  for (Eigen::Index i = 0; i < actual.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", actual(i), predicted(i));
    out << format_timestamp(times[static_cast<std::size_t>(i)]) << buf;
  }
}

struct ChartSeries {
  std::string label;
  std::string color;
  const Eigen::VectorXd* values;
};

/// Polyline chart of one or more equally sampled series over a shared x axis
/// (sample index), with day gridlines every `per_day` samples.
inline std::string svg_line_chart(const std::string& title, const std::vector<ChartSeries>& series,
                                  int per_day, const std::string& y_label = "kW") {
  constexpr double W = 960, H = 360, L = 60, R = 20, T = 36, B = 40;
  Eigen::Index n = 0;
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.values->size());
    if (s.values->size() == 0) continue;
    const double a = s.values->minCoeff(), b = s.values->maxCoeff();
    lo = first ? a : std::min(lo, a);
    hi = first ? b : std::max(hi, b);
    first = false;
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](Eigen::Index i) { return L + (W - L - R) * (n > 1 ? double(i) / double(n - 1) : 0.0); };
  auto py = [&](double v) { return T + (H - T - B) * (1.0 - (v - lo) / (hi - lo)); };

  std::string svg;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                W, H);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(int(W / 2)) + "\" y=\"20\" text-anchor=\"middle\">" + title +
         "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.0f</text>\n",
                  L, py(v), W - R, py(v), L - 4, py(v) + 4, v);
    svg += buf;
  }
  if (per_day > 0)
    for (Eigen::Index d = per_day; d < n; d += per_day) {
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#eee\"/>\n",
                    px(d), T, px(d), H - B);
      svg += buf;
    }
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%.1f\" transform=\"rotate(-90 14 %.1f)\" "
                "text-anchor=\"middle\">%s</text>\n",
                H / 2, H / 2, y_label.c_str());
  svg += buf;
  double legend_x = L + 10;
  for (const auto& s : series) {
    svg += "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" + s.color + "\" points=\"";
    for (Eigen::Index i = 0; i < s.values->size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", i ? " " : "", px(i), py((*s.values)(i)));
      svg += buf;
    }
    svg += "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"14\" height=\"3\" fill=\"%s\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">",
                  legend_x, H - 16, s.color.c_str(), legend_x + 18, H - 11);
    svg += buf;
    svg += s.label + "</text>\n";
    legend_x += 120;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace heatcast
