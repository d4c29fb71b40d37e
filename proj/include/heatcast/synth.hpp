#pragma once

// Synthetic building: diurnal weather, schedule-driven target demand and a
// first-order lagged plant response. Stands in for measured data.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "heatcast/core_data.hpp"
#include "heatcast/schedules.hpp"
#include "json.hpp"

namespace heatcast {

struct BuildingParams {
  double tau = 15.0;      // time constant, min
  double delay = 15.0;    // transport delay, min
  double ua = 60.0;       // heat-loss coefficient, kW/°C
  double t_set = 20.0;    // °C
  double g_ap = 0.5;      // solar aperture gain, kW per W/m²
  double g_occ = 60.0;    // occupant gain at full occupancy, kW
  double p_max = 1200.0;  // plant capacity, kW
  double noise_std = 0.0; // kW
  std::uint64_t seed = 1;
};

/// Defaults follow the winter case-study ranges (about 1 to 15 °C, solar
/// peaks near 440 W/m²).
struct WeatherModel {
  double t_mean = 8.95;
  double t_amplitude = 3.5;
  double solar_peak = 438.0;
  double day_length = 9.5;  // hours of daylight, centred on 12:30
  double weather_noise_std = 1.5;
};

namespace detail {
/// Engine-bit based variates so a seed yields the same stream on every
/// standard library.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};
}  // namespace detail

inline void validate(const BuildingParams& bp, int ts) {
  if (ts <= 0 || kMinutesPerDay % ts != 0) throw Error("synth: ts must divide a day");
  if (!(bp.tau > 0.0)) throw Error("synth: tau must be positive");
  if (ts > bp.tau) throw Error("synth: forward-Euler lag requires ts <= tau");
  if (bp.delay < 0.0 || std::fmod(bp.delay, ts) != 0.0)
    throw Error("synth: delay must be a non-negative multiple of ts");
  if (!(bp.ua > 0.0) || !(bp.p_max > 0.0)) throw Error("synth: ua and p_max must be positive");
  if (bp.noise_std < 0.0) throw Error("synth: noise_std must be non-negative");
}

/// Heat demand the plant would deliver instantly:
/// oplevel * clamp(ua (t_set - t_out) - g_ap g_solar - g_occ occ, 0, p_max).
inline double target_demand(const BuildingParams& bp, double oplevel, double t_out, double g_solar,
                            double occupancy) {
  const double load = bp.ua * (bp.t_set - t_out) - bp.g_ap * g_solar - bp.g_occ * occupancy;
  return oplevel * std::clamp(load, 0.0, bp.p_max);
}

/// Half-sine daylight profile scaled by `clearness`; zero outside daylight.
inline double solar_profile(const WeatherModel& wm, int minute, double clearness) {
  const double h = minute / 60.0;
  const double sunrise = 12.5 - wm.day_length / 2.0;
  if (h <= sunrise || h >= sunrise + wm.day_length) return 0.0;
  return wm.solar_peak * clearness * std::sin(std::numbers::pi * (h - sunrise) / wm.day_length);
}

/// `days` whole days from `start` (midnight). Realized demand follows
/// D(t+1) = D(t) + (ts/tau) (D*(t - delay) - D(t)) + noise, clamped to
/// [0, p_max]; D(0) = D*(0) and D* before the first sample is D*(0).
inline Dataset generate(int days, const ScheduleSet& sched, const BuildingParams& bp,
                        const WeatherModel& wm, int ts, Date start) {
  if (days < 1) throw Error("synth: days must be at least 1");
  validate(bp, ts);
  validate(sched, ts);
  detail::SynthRng rng(bp.seed);

  const int per_day = kMinutesPerDay / ts;
  const std::size_t n = static_cast<std::size_t>(days) * static_cast<std::size_t>(per_day);
  Dataset ds;
  ds.ts = ts;
  ds.samples.resize(n);
  std::vector<double> d_star(n);

  double day_offset = 0.0;
  for (int day = 0; day < days; ++day) {
    // AR(1) day-to-day temperature anomaly and a per-day sky clearness.
    day_offset = 0.6 * day_offset + 0.8 * wm.weather_noise_std * rng.normal();
    const double clearness = 0.15 + 0.85 * rng.uniform();
    const Date date = start + std::chrono::days{day};
    const DayType type = sched.calendar.day_type(date);
    for (int k = 0; k < per_day; ++k) {
      const std::size_t i = static_cast<std::size_t>(day * per_day + k);
      const int minute = k * ts;
      auto& s = ds.samples[i];
      s.timestamp = Timestamp{date} + std::chrono::minutes{minute};
      const double diurnal = std::cos(2.0 * std::numbers::pi * (minute / 60.0 - 15.0) / 24.0);
      s.t_out = wm.t_mean + day_offset + wm.t_amplitude * diurnal +
                0.1 * wm.weather_noise_std * rng.normal();
      s.g_solar = std::max(0.0, solar_profile(wm, minute, clearness) * (1.0 + 0.05 * rng.normal()));
      d_star[i] = target_demand(bp, profile_value(sched.oplevel(type), minute), s.t_out, s.g_solar,
                                profile_value(sched.occupancy(type), minute));
    }
  }

  const auto delay_steps = static_cast<std::size_t>(std::lround(bp.delay / ts));
  const double gain = ts / bp.tau;
  double d = d_star[0];
  for (std::size_t i = 0; i < n; ++i) {
    ds.samples[i].p_heat = d;
    const double driven = d_star[i >= delay_steps ? i - delay_steps : 0];
    const double noise = bp.noise_std > 0.0 ? bp.noise_std * rng.normal() : 0.0;
    d = std::clamp(d + gain * (driven - d) + noise, 0.0, bp.p_max);
  }
  return ds;
}

inline nlohmann::json to_json(const BuildingParams& bp) {
  return {{"tau", bp.tau},         {"delay", bp.delay},     {"ua", bp.ua},
          {"t_set", bp.t_set},     {"g_ap", bp.g_ap},       {"g_occ", bp.g_occ},
          {"p_max", bp.p_max},     {"noise_std", bp.noise_std}, {"seed", bp.seed}};
}

inline nlohmann::json to_json(const WeatherModel& wm) {
  return {{"t_mean", wm.t_mean},
          {"t_amplitude", wm.t_amplitude},
          {"solar_peak", wm.solar_peak},
          {"day_length", wm.day_length},
          {"weather_noise_std", wm.weather_noise_std}};
}

/// Ground-truth sidecar written next to generated data.
inline nlohmann::json truth_json(int days, int ts, Date start, const ScheduleSet& sched,
                                 const BuildingParams& bp, const WeatherModel& wm) {
  return {{"days", days},
          {"ts", ts},
          {"start", format_date(start)},
          {"building", to_json(bp)},
          {"weather", to_json(wm)},
          {"schedule", to_json(sched)}};
}

}  // namespace heatcast
