#pragma once

// Day-type calendar, piecewise-constant daily profiles, and the
// transition-shift mechanics driven by the orthogonal-array search.

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatcast/core_data.hpp"
#include "json.hpp"

namespace heatcast {

enum class DayType { Working, Off };

inline const char* to_string(DayType d) { return d == DayType::Working ? "working" : "off"; }

struct Breakpoint {
  int minute = 0;  // minutes since midnight
  double level = 0.0;

  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Closed-open step function over one day: a breakpoint's level takes effect
/// at its minute and holds until the next breakpoint.
struct StepProfile {
  std::vector<Breakpoint> breakpoints;

  std::size_t transitions() const noexcept {
    return breakpoints.empty() ? 0 : breakpoints.size() - 1;
  }

  friend bool operator==(const StepProfile&, const StepProfile&) = default;
};

/// Throws unless the profile starts at minute 0, is strictly increasing,
/// stays below 1440, uses non-negative levels and (when ts > 0) sits on the
/// sampling grid.
inline void validate(const StepProfile& p, std::string_view name, int ts = 0) {
  const std::string n(name);
  if (p.breakpoints.empty()) throw Error("schedules: profile '" + n + "' has no breakpoints");
  if (p.breakpoints.front().minute != 0)
    throw Error("schedules: profile '" + n + "' must start at minute 0");
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
    const auto& b = p.breakpoints[i];
    if (b.minute < 0 || b.minute >= kMinutesPerDay)
      throw Error("schedules: profile '" + n + "' breakpoint outside [0,1440)");
    if (!(b.level >= 0.0)) throw Error("schedules: profile '" + n + "' has a negative level");
    if (ts > 0 && b.minute % ts != 0)
      throw Error("schedules: profile '" + n + "' breakpoint at minute " +
                  std::to_string(b.minute) + " is off the " + std::to_string(ts) + "-min grid");
    if (i > 0 && b.minute <= p.breakpoints[i - 1].minute)
      throw Error("schedules: profile '" + n + "' breakpoints not strictly increasing");
  }
}

inline double profile_value(const StepProfile& p, int minute_of_day) {
  double level = p.breakpoints.front().level;
  for (const auto& b : p.breakpoints) {
    if (b.minute > minute_of_day) break;
    level = b.level;
  }
  return level;
}

/// Saturday and Sunday are Off, every other day Working, unless overridden.
/// An unset range admits every date.
struct Calendar {
  std::optional<Date> first;
  std::optional<Date> last;
  std::map<Date, DayType> overrides;

  bool contains(Date d) const {
    return (!first || d >= *first) && (!last || d <= *last);
  }

  DayType day_type(Date d) const {
    if (!contains(d)) throw Error("schedules: date " + format_date(d) + " outside calendar range");
    if (auto it = overrides.find(d); it != overrides.end()) return it->second;
    const std::chrono::weekday wd{d};
    return (wd == std::chrono::Saturday || wd == std::chrono::Sunday) ? DayType::Off
                                                                      : DayType::Working;
  }

  friend bool operator==(const Calendar&, const Calendar&) = default;
};

inline constexpr double kWorkingDayFlag = 10.0;
inline constexpr double kOffDayFlag = 5.0;

inline double day_flag(Date d, const Calendar& cal) {
  return cal.day_type(d) == DayType::Working ? kWorkingDayFlag : kOffDayFlag;
}

struct ScheduleSet {
  StepProfile occupancy_working;
  StepProfile occupancy_off;
  StepProfile oplevel_working;
  StepProfile oplevel_off;
  Calendar calendar;

  const StepProfile& occupancy(DayType d) const {
    return d == DayType::Working ? occupancy_working : occupancy_off;
  }
  const StepProfile& oplevel(DayType d) const {
    return d == DayType::Working ? oplevel_working : oplevel_off;
  }

  friend bool operator==(const ScheduleSet&, const ScheduleSet&) = default;
};

inline void validate(const ScheduleSet& s, int ts = 0) {
  validate(s.occupancy_working, "occupancy_working", ts);
  validate(s.occupancy_off, "occupancy_off", ts);
  validate(s.oplevel_working, "oplevel_working", ts);
  validate(s.oplevel_off, "oplevel_off", ts);
  if (s.occupancy_off.transitions() != 0)
    throw Error("schedules: occupancy_off must not have transitions after minute 0");
}

/// Case-study schedule. Transition times t1..t10 are the control-factor
/// defaults; levels are relative (occupancy fraction, plant power fraction).
inline ScheduleSet default_schedule() {
  ScheduleSet s;
  s.occupancy_working.breakpoints = {{0, 0.0}, {480, 1.0}, {720, 0.4}, {810, 1.0}, {1065, 0.0}};
  s.occupancy_off.breakpoints = {{0, 0.0}};
  s.oplevel_working.breakpoints = {{0, 0.3}, {360, 1.0}, {720, 0.6}, {840, 0.85}, {1200, 0.3}};
  s.oplevel_off.breakpoints = {{0, 0.3}, {360, 0.6}, {1200, 0.3}};
  return s;
}

/// Which transition of which profile a control factor moves.
enum class ProfileSlot { OccupancyWorking, OplevelWorking, OplevelOff };

struct FactorBinding {
  ProfileSlot slot;
  std::size_t transition;  // 1-based breakpoint index within the profile
};

inline constexpr std::size_t kFactorCount = 10;

/// f1..f4 occupancy (working), f5..f8 operational level (working),
/// f9..f10 operational level (off).
inline constexpr std::array<FactorBinding, kFactorCount> kFactorBindings{{
    {ProfileSlot::OccupancyWorking, 1},
    {ProfileSlot::OccupancyWorking, 2},
    {ProfileSlot::OccupancyWorking, 3},
    {ProfileSlot::OccupancyWorking, 4},
    {ProfileSlot::OplevelWorking, 1},
    {ProfileSlot::OplevelWorking, 2},
    {ProfileSlot::OplevelWorking, 3},
    {ProfileSlot::OplevelWorking, 4},
    {ProfileSlot::OplevelOff, 1},
    {ProfileSlot::OplevelOff, 2},
}};

/// Signed minute offsets for the ten factors.
struct FactorAssignment {
  std::array<int, kFactorCount> shifts{};

  /// Three-level encoding: level 0/1/2 maps to -ts/0/+ts.
  static FactorAssignment from_levels(std::span<const int> levels, int ts) {
    if (levels.size() != kFactorCount)
      throw Error("schedules: expected 10 factor levels, got " + std::to_string(levels.size()));
    FactorAssignment a;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
      if (levels[i] < 0 || levels[i] > 2)
        throw Error("schedules: factor level out of range for f" + std::to_string(i + 1));
      a.shifts[i] = (levels[i] - 1) * ts;
    }
    return a;
  }

  FactorAssignment negated() const {
    FactorAssignment a;
    for (std::size_t i = 0; i < kFactorCount; ++i) a.shifts[i] = -shifts[i];
    return a;
  }
};

namespace detail {
inline StepProfile& slot_profile(ScheduleSet& s, ProfileSlot slot) {
  switch (slot) {
    case ProfileSlot::OccupancyWorking: return s.occupancy_working;
    case ProfileSlot::OplevelWorking: return s.oplevel_working;
    case ProfileSlot::OplevelOff: return s.oplevel_off;
  }
  return s.oplevel_off;
}
}  // namespace detail

/// Returns a copy with each bound transition moved by its offset. Throws,
/// naming the factor, when a shift leaves the day or collides with or
/// crosses a neighbouring breakpoint.
inline ScheduleSet apply_shifts(const ScheduleSet& s, const FactorAssignment& a) {
  ScheduleSet out = s;
  for (std::size_t f = 0; f < kFactorCount; ++f) {
    auto& p = detail::slot_profile(out, kFactorBindings[f].slot);
    const auto idx = kFactorBindings[f].transition;
    if (idx >= p.breakpoints.size())
      throw Error("schedules: factor f" + std::to_string(f + 1) + " has no transition to bind");
    p.breakpoints[idx].minute += a.shifts[f];
  }
  // Checked after all moves so that shifting two neighbours in the same
  // direction is legal.
  for (std::size_t f = 0; f < kFactorCount; ++f) {
    const auto& p = detail::slot_profile(out, kFactorBindings[f].slot);
    const auto idx = kFactorBindings[f].transition;
    const int m = p.breakpoints[idx].minute;
    const bool ok = m > p.breakpoints[idx - 1].minute && m < kMinutesPerDay &&
                    (idx + 1 >= p.breakpoints.size() || m < p.breakpoints[idx + 1].minute);
    if (!ok)
      throw Error("schedules: shift of factor f" + std::to_string(f + 1) +
                  " collides with a neighbouring breakpoint");
  }
  return out;
}

struct ScheduleSeries {
  std::vector<double> occupancy;
  std::vector<double> oplevel;
  std::vector<double> dayflag;
};

inline ScheduleSeries sample_schedules(const ScheduleSet& s, const Dataset& ds) {
  ScheduleSeries out;
  out.occupancy.reserve(ds.size());
  out.oplevel.reserve(ds.size());
  out.dayflag.reserve(ds.size());
  for (const auto& smp : ds.samples) {
    const Date d = date_of(smp.timestamp);
    const DayType type = s.calendar.day_type(d);
    const int mod = minute_of_day(smp.timestamp);
    out.occupancy.push_back(profile_value(s.occupancy(type), mod));
    out.oplevel.push_back(profile_value(s.oplevel(type), mod));
    out.dayflag.push_back(type == DayType::Working ? kWorkingDayFlag : kOffDayFlag);
  }
  return out;
}

// JSON schedule file:
// {
//   "occupancy_working": [[0, 0.0], [480, 1.0], ...],
//   "occupancy_off": [[0, 0.0]],
//   "oplevel_working": [...], "oplevel_off": [...],
//   "calendar": {"first": "2013-01-14", "last": "2013-02-09",
//                "overrides": {"2013-01-21": "off"}}
// }

inline nlohmann::json profile_to_json(const StepProfile& p) {
  auto arr = nlohmann::json::array();
  for (const auto& b : p.breakpoints) arr.push_back({b.minute, b.level});
  return arr;
}

inline StepProfile profile_from_json(const nlohmann::json& j, std::string_view name) {
  if (!j.is_array()) throw Error("schedules: '" + std::string(name) + "' must be an array");
  StepProfile p;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
      throw Error("schedules: '" + std::string(name) + "' entries must be [minute, level] pairs");
    p.breakpoints.push_back({e[0].get<int>(), e[1].get<double>()});
  }
  return p;
}

inline nlohmann::json to_json(const ScheduleSet& s) {
  nlohmann::json j;
  j["occupancy_working"] = profile_to_json(s.occupancy_working);
  j["occupancy_off"] = profile_to_json(s.occupancy_off);
  j["oplevel_working"] = profile_to_json(s.oplevel_working);
  j["oplevel_off"] = profile_to_json(s.oplevel_off);
  nlohmann::json cal = nlohmann::json::object();
  if (s.calendar.first) cal["first"] = format_date(*s.calendar.first);
  if (s.calendar.last) cal["last"] = format_date(*s.calendar.last);
  nlohmann::json ov = nlohmann::json::object();
  for (const auto& [d, t] : s.calendar.overrides) ov[format_date(d)] = to_string(t);
  cal["overrides"] = ov;
  j["calendar"] = cal;
  return j;
}

/// Missing profiles fall back to the case-study defaults.
inline ScheduleSet schedule_from_json(const nlohmann::json& j) {
  ScheduleSet s = default_schedule();
  if (!j.is_object()) throw Error("schedules: schedule file must hold a JSON object");
  auto read = [&](const char* key, StepProfile& p) {
    if (j.contains(key)) p = profile_from_json(j.at(key), key);
  };
  read("occupancy_working", s.occupancy_working);
  read("occupancy_off", s.occupancy_off);
  read("oplevel_working", s.oplevel_working);
  read("oplevel_off", s.oplevel_off);
  if (j.contains("calendar")) {
    const auto& cal = j.at("calendar");
    auto read_date = [](const nlohmann::json& v) {
      Date d;
      if (!v.is_string() || !parse_date(v.get<std::string>(), d))
        throw Error("schedules: calendar dates must be YYYY-MM-DD strings");
      return d;
    };
    if (cal.contains("first")) s.calendar.first = read_date(cal.at("first"));
    if (cal.contains("last")) s.calendar.last = read_date(cal.at("last"));
    if (cal.contains("overrides")) {
      for (const auto& [k, v] : cal.at("overrides").items()) {
        const auto type = v.is_string() ? v.get<std::string>() : std::string{};
        if (type != "working" && type != "off")
          throw Error("schedules: override for " + k + " must be \"working\" or \"off\"");
        s.calendar.overrides[read_date(nlohmann::json(k))] =
            type == "working" ? DayType::Working : DayType::Off;
      }
    }
  }
  validate(s);
  return s;
}

inline ScheduleSet load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("schedules: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("schedules: malformed JSON in '" + path + "': " + e.what());
  }
  return schedule_from_json(j);
}

}  // namespace heatcast
