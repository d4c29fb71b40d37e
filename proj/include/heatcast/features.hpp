#pragma once

// Transitional characteristic, pseudo-dynamic lag bounds, and input-matrix
// assembly for the six model variants.

#include <Eigen/Core>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "heatcast/core_data.hpp"
#include "heatcast/schedules.hpp"

namespace heatcast {

struct TransitionalConfig {
  double beta0 = 25.0;       // initial transition power level
  double delta_beta = 25.0;  // step size of the transition power level
};

/// Staircase built from the operational level series: starts at beta0 and at
/// every sample where the level changes climbs by 2*delta_beta*|new - old|.
/// `day_ids` (optional, same length) restarts the staircase at each new day.
inline std::vector<double> transitional_series(std::span<const double> oplevel,
                                               const TransitionalConfig& cfg,
                                               std::span<const long> day_ids = {}) {
  if (!(cfg.beta0 > 0.0) || !(cfg.delta_beta > 0.0))
    throw Error("features: beta0 and delta_beta must be positive");
  if (oplevel.empty()) throw Error("features: empty operational level series");
  if (!day_ids.empty() && day_ids.size() != oplevel.size())
    throw Error("features: day id series not aligned with operational level series");

  std::vector<double> beta(oplevel.size());
  double level = cfg.beta0;
  for (std::size_t i = 0; i < oplevel.size(); ++i) {
    const bool new_day = i > 0 && !day_ids.empty() && day_ids[i] != day_ids[i - 1];
    if (new_day)
      level = cfg.beta0;
    else if (i > 0 && oplevel[i] != oplevel[i - 1])
      level += 2.0 * cfg.delta_beta * std::abs(oplevel[i] - oplevel[i - 1]);
    beta[i] = level;
  }
  return beta;
}

/// Day-resetting staircase for a dataset's sampled operational level.
inline std::vector<double> transitional_series(const Dataset& ds, std::span<const double> oplevel,
                                               const TransitionalConfig& cfg) {
  std::vector<long> days;
  days.reserve(ds.size());
  for (const auto& s : ds.samples) days.push_back(date_of(s.timestamp).time_since_epoch().count());
  return transitional_series(oplevel, cfg, days);
}

/// First-order building dynamics, all in minutes.
struct DynamicsSpec {
  double tau = 15.0;
  double t_settle = 45.0;
  double t_steady = 60.0;
};

inline void validate(const DynamicsSpec& d) {
  constexpr double kTol = 1e-9;
  if (!(d.tau > 0.0)) throw Error("features: tau must be positive");
  if (d.t_settle < 2 * d.tau - kTol || d.t_settle > 5 * d.tau + kTol)
    throw Error("features: settling time must lie in [2 tau, 5 tau]");
  if (d.t_steady < 3 * d.tau - kTol || d.t_steady > 6 * d.tau + kTol)
    throw Error("features: steady-state time must lie in [3 tau, 6 tau]");
  if (d.t_settle > d.t_steady + kTol)
    throw Error("features: settling time exceeds steady-state time");
}

struct PdlBounds {
  int min = 0;
  int max = 0;
};

/// Lag band [t_settle/ts, t_steady/ts] intersected with (tau/ts)*[3, 6].
inline PdlBounds pdl_bounds(const DynamicsSpec& d, int ts) {
  validate(d);
  if (ts <= 0) throw Error("features: sampling interval must be positive");
  auto whole = [ts](double minutes, const char* what) {
    const double q = minutes / ts;
    if (std::abs(q - std::round(q)) > 1e-9)
      throw Error(std::string("features: sampling interval does not divide the ") + what);
    return static_cast<int>(std::round(q));
  };
  const int settle = whole(d.t_settle, "settling time");
  const int steady = whole(d.t_steady, "steady-state time");
  const double r = d.tau / ts;
  PdlBounds b{std::max(settle, static_cast<int>(std::ceil(3 * r - 1e-9))),
              std::min(steady, static_cast<int>(std::floor(6 * r + 1e-9)))};
  if (b.min > b.max) throw Error("features: empty pseudo-dynamic lag band");
  return b;
}

inline constexpr int kModelCount = 6;

/// Number of beta lags appended for a model id (models 3..6 carry 1..4).
inline int lag_depth(int model_id) { return model_id >= 3 ? model_id - 2 : 0; }

/// Input vector length for a model id: 5 for model 1, one more per model.
inline int input_length(int model_id) { return model_id + 4; }

struct FeatureMatrix {
  int model_id = 1;
  int l_x = 5;
  std::vector<std::string> column_names;
  Eigen::MatrixXd inputs;  // rows x l_x
  Eigen::VectorXd target;  // p_heat, kW
  std::vector<Timestamp> times;

  Eigen::Index rows() const { return inputs.rows(); }
};

/// Columns: [t_out, g_solar, dayflag, occupancy, oplevel], then beta for
/// models >= 2, then beta lags 1..M for models 3..6. The first M rows have
/// no complete lag history and are dropped.
inline FeatureMatrix assemble(const Dataset& ds, const ScheduleSeries& sched,
                              std::span<const double> beta, int model_id) {
  if (model_id < 1 || model_id > kModelCount)
    throw Error("features: model id " + std::to_string(model_id) + " outside 1..6");
  const std::size_t n = ds.size();
  if (sched.occupancy.size() != n || sched.oplevel.size() != n || sched.dayflag.size() != n ||
      (model_id >= 2 && beta.size() != n))
    throw Error("features: series not aligned with dataset");
  const auto lags = static_cast<std::size_t>(lag_depth(model_id));
  if (n <= lags) throw Error("features: dataset shorter than lag warm-up");

  FeatureMatrix fm;
  fm.model_id = model_id;
  fm.l_x = input_length(model_id);
  fm.column_names = {"t_out_c", "solar_wm2", "day_flag", "occupancy", "oplevel"};
  if (model_id >= 2) fm.column_names.emplace_back("beta");
  for (std::size_t m = 1; m <= lags; ++m) fm.column_names.push_back("beta_lag" + std::to_string(m));

  const auto rows = static_cast<Eigen::Index>(n - lags);
  fm.inputs.resize(rows, fm.l_x);
  fm.target.resize(rows);
  fm.times.reserve(static_cast<std::size_t>(rows));
  for (std::size_t t = lags; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t - lags);
    const auto& s = ds.samples[t];
    fm.inputs(r, 0) = s.t_out;
    fm.inputs(r, 1) = s.g_solar;
    fm.inputs(r, 2) = sched.dayflag[t];
    fm.inputs(r, 3) = sched.occupancy[t];
    fm.inputs(r, 4) = sched.oplevel[t];
    if (model_id >= 2) fm.inputs(r, 5) = beta[t];
    for (std::size_t m = 1; m <= lags; ++m)
      fm.inputs(r, static_cast<Eigen::Index>(5 + m)) = beta[t - m];
    fm.target(r) = s.p_heat;
    fm.times.push_back(s.timestamp);
  }
  return fm;
}

/// Samples the schedules over `ds`, builds the staircase, and assembles.
inline FeatureMatrix build_features(const Dataset& ds, const ScheduleSet& sched,
                                    const TransitionalConfig& cfg, int model_id) {
  const auto series = sample_schedules(sched, ds);
  const auto beta = transitional_series(ds, series.oplevel, cfg);
  return assemble(ds, series, beta, model_id);
}

inline void write_feature_csv(std::ostream& out, const FeatureMatrix& fm) {
  out << "timestamp";
  for (const auto& c : fm.column_names) out << ',' << c;
  out << ",heat_kw\n";
  char buf[48];
  for (Eigen::Index r = 0; r < fm.rows(); ++r) {
    out << format_timestamp(fm.times[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < fm.inputs.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.10g", fm.inputs(r, c));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.10g\n", fm.target(r));
    out << buf;
  }
}

}  // namespace heatcast
