#pragma once

// Pearson-correlation screening of candidate inputs against heat demand.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "heatcast/core_data.hpp"
#include "heatcast/schedules.hpp"

namespace heatcast {

/// r = cov(x, y) / (s_x s_y) with (n - 1) denominators throughout.
inline double pearson(std::span<const double> x, std::span<const double> y,
                      std::string_view x_name = "x", std::string_view y_name = "y") {
  if (x.size() != y.size()) throw Error("relevance: series lengths differ");
  if (x.size() < 2) throw Error("relevance: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error("relevance: series '" + std::string(x_name) + "' is constant");
  if (!(syy > 0.0)) throw Error("relevance: series '" + std::string(y_name) + "' is constant");
  const double r = (sxy / (n - 1)) / (std::sqrt(sxx / (n - 1)) * std::sqrt(syy / (n - 1)));
  return std::clamp(r, -1.0, 1.0);
}

enum class RelevanceBand { PerfectPos, StrongPos, MediumPos, SmallPos, Negligible, Negative, PerfectNeg };

inline const char* to_string(RelevanceBand b) {
  switch (b) {
    case RelevanceBand::PerfectPos: return "perfect_positive";
    case RelevanceBand::StrongPos: return "strong_positive";
    case RelevanceBand::MediumPos: return "medium_positive";
    case RelevanceBand::SmallPos: return "small_positive";
    case RelevanceBand::Negligible: return "negligible";
    case RelevanceBand::Negative: return "negative";
    case RelevanceBand::PerfectNeg: return "perfect_negative";
  }
  return "unknown";
}

/// Cut points 0.1 / 0.25 / 0.6, each band open below and closed above:
/// [0, 0.1] negligible, (0.1, 0.25] small, (0.25, 0.6] medium, (0.6, 1)
/// strong. |r -/+ 1| <= 1e-12 counts as perfect; any other r < 0 is negative.
inline RelevanceBand band(double r) {
  constexpr double kPerfectTol = 1e-12;
  if (r >= 1.0 - kPerfectTol) return RelevanceBand::PerfectPos;
  if (r <= -1.0 + kPerfectTol) return RelevanceBand::PerfectNeg;
  if (r < 0.0) return RelevanceBand::Negative;
  if (r <= 0.1) return RelevanceBand::Negligible;
  if (r <= 0.25) return RelevanceBand::SmallPos;
  if (r <= 0.6) return RelevanceBand::MediumPos;
  return RelevanceBand::StrongPos;
}

struct RelevanceEntry {
  std::string variable;
  double r = 0.0;
  RelevanceBand band = RelevanceBand::Negligible;
};

/// Screens outside temperature, solar radiation, occupancy and operational
/// level against heat demand. Lagged transitional features are excluded.
inline std::vector<RelevanceEntry> relevance_report(const Dataset& ds, const ScheduleSeries& sched) {
  const auto heat = ds.p_heat();
  const std::vector<std::pair<std::string, std::vector<double>>> candidates{
      {"t_out_c", ds.t_out()},
      {"solar_wm2", ds.g_solar()},
      {"occupancy", sched.occupancy},
      {"oplevel", sched.oplevel},
  };
  std::vector<RelevanceEntry> out;
  for (const auto& [name, series] : candidates) {
    const double r = pearson(series, heat, name, "heat_kw");
    out.push_back({name, r, band(r)});
  }
  return out;
}

}  // namespace heatcast
