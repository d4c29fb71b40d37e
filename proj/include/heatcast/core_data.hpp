#pragma once

// Time-series ingestion, day-snapped partitioning and z-score normalization.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "heatcast/error.hpp"

namespace heatcast {

/// Wall-clock timestamp at minute resolution. Timestamps are naive local
/// time; no time-zone conversion is ever applied.
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;
using Date = std::chrono::sys_days;

inline constexpr int kMinutesPerDay = 1440;

inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline int minute_of_day(Timestamp t) {
  return static_cast<int>((t - date_of(t)).count());
}

inline std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Timestamp t) {
  const int mod = minute_of_day(t);
  char buf[24];
  std::snprintf(buf, sizeof buf, "T%02d:%02d", mod / 60, mod % 60);
  return format_date(date_of(t)) + buf;
}

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline bool parse_date(std::string_view s, Date& out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!detail::parse_int(s.substr(0, 4), y) || !detail::parse_int(s.substr(5, 2), m) ||
      !detail::parse_int(s.substr(8, 2), d))
    return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = Date{ymd};
  return true;
}

/// Accepts `YYYY-MM-DDTHH:MM`, optionally with `:SS` (must be 00) and with a
/// space instead of `T`.
inline bool parse_timestamp(std::string_view s, Timestamp& out) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  if (s.size() != 16 && s.size() != 19) return false;
  if (s[10] != 'T' && s[10] != ' ') return false;
  Date d;
  if (!parse_date(s.substr(0, 10), d)) return false;
  int hh = 0, mm = 0;
  if (s[13] != ':' || !detail::parse_int(s.substr(11, 2), hh) ||
      !detail::parse_int(s.substr(14, 2), mm))
    return false;
  if (s.size() == 19 && (s[16] != ':' || s.substr(17, 2) != "00")) return false;
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59) return false;
  out = Timestamp{d} + std::chrono::minutes{hh * 60 + mm};
  return true;
}

struct Sample {
  Timestamp timestamp;
  double t_out = 0.0;    // °C
  double g_solar = 0.0;  // W/m²
  double p_heat = 0.0;   // kW
};

struct Dataset {
  std::vector<Sample> samples;
  int ts = 15;  // sampling interval, minutes

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  int samples_per_day() const noexcept { return kMinutesPerDay / ts; }

  std::vector<double> t_out() const { return column(&Sample::t_out); }
  std::vector<double> g_solar() const { return column(&Sample::g_solar); }
  std::vector<double> p_heat() const { return column(&Sample::p_heat); }

  /// Contiguous sub-range [first, first + count).
  Dataset slice(std::size_t first, std::size_t count) const {
    Dataset out;
    out.ts = ts;
    out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                       samples.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
  }

 private:
  std::vector<double> column(double Sample::*field) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.*field);
    return out;
  }
};

/// Checks the Sample and Dataset invariants, throwing on the first violation.
inline void validate(const Dataset& ds) {
  if (ds.ts <= 0) throw Error("core_data: sampling interval must be positive");
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    if (!(s.g_solar >= 0.0) || !(s.p_heat >= 0.0))
      throw Error("core_data: negative solar or heat value at sample " + std::to_string(i));
    if (i == 0) continue;
    const auto& prev = ds.samples[i - 1];
    const auto gap = (s.timestamp - prev.timestamp).count();
    if (gap <= 0)
      throw Error("core_data: timestamps not strictly increasing: " +
                  format_timestamp(prev.timestamp) + " then " + format_timestamp(s.timestamp));
    if (gap != ds.ts)
      throw Error("core_data: cadence gap between " + format_timestamp(prev.timestamp) + " and " +
                  format_timestamp(s.timestamp) + " (expected " + std::to_string(ds.ts) +
                  " min)");
  }
}

inline constexpr std::string_view kCsvHeader = "timestamp,t_out_c,solar_wm2,heat_kw";

/// Parses the four-column CSV. The sampling interval is the gap between the
/// first two rows; every later gap must match it.
inline Dataset parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("core_data: empty CSV (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  if (line != kCsvHeader)
    throw Error("core_data: bad header '" + line + "', expected '" + std::string(kCsvHeader) + "'");

  Dataset ds;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_fields(line, ',');
    if (f.size() != 4)
      throw Error("core_data: row " + std::to_string(row) + ": expected 4 columns, got " +
                  std::to_string(f.size()));
    Sample s;
    if (!parse_timestamp(f[0], s.timestamp))
      throw Error("core_data: row " + std::to_string(row) + ": bad timestamp '" +
                  std::string(f[0]) + "'");
    if (!detail::parse_double(f[1], s.t_out) || !detail::parse_double(f[2], s.g_solar) ||
        !detail::parse_double(f[3], s.p_heat))
      throw Error("core_data: row " + std::to_string(row) + ": unparsable or missing value");
    if (s.g_solar < 0.0 || s.p_heat < 0.0)
      throw Error("core_data: row " + std::to_string(row) + ": negative solar or heat value");
    ds.samples.push_back(s);
  }
  if (ds.samples.size() < 2) throw Error("core_data: need at least two data rows");
  const auto first_gap = (ds.samples[1].timestamp - ds.samples[0].timestamp).count();
  if (first_gap <= 0)
    throw Error("core_data: timestamps not strictly increasing: " +
                format_timestamp(ds.samples[0].timestamp) + " then " +
                format_timestamp(ds.samples[1].timestamp));
  ds.ts = static_cast<int>(first_gap);
  validate(ds);
  return ds;
}

inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("core_data: cannot open '" + path + "'");
  return parse_csv(in);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  out << kCsvHeader << '\n';
  char buf[96];
  for (const auto& s : ds.samples) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f\n", s.t_out, s.g_solar, s.p_heat);
    out << format_timestamp(s.timestamp) << buf;
  }
}

inline void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("core_data: cannot write '" + path + "'");
  write_csv(out, ds);
}

struct SplitSpec {
  double learn_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
};

struct DaySplit {
  int learn_days = 0;
  int validation_days = 0;
  int test_days = 0;
};

/// Largest-remainder apportionment of `days` whole days. Remainder ties go to
/// the earlier block (learn, then validation, then test).
inline DaySplit apportion_days(int days, const SplitSpec& spec) {
  const std::array<double, 3> f{spec.learn_fraction, spec.validation_fraction, spec.test_fraction};
  for (double x : f)
    if (!(x > 0.0 && x < 1.0)) throw Error("core_data: split fractions must lie in (0,1)");
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9)
    throw Error("core_data: split fractions must sum to 1");

  constexpr double kEps = 1e-9;
  std::array<int, 3> whole{};
  std::array<double, 3> rem{};
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = days * f[i];
    whole[i] = static_cast<int>(std::floor(quota + kEps));
    rem[i] = quota - whole[i];
    assigned += whole[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b] + kEps; });
  for (int k = 0; assigned < days; ++k, ++assigned) ++whole[order[k % 3]];
  return {whole[0], whole[1], whole[2]};
}

struct SplitBlocks {
  Dataset learn;
  Dataset validation;
  Dataset test;
};

/// Contiguous learn/validation/test blocks in chronological order, with
/// boundaries snapped to whole days (a day is samples_per_day consecutive
/// samples from the start). A trailing partial day is appended to the test
/// block.
inline SplitBlocks split(const Dataset& ds, const SplitSpec& spec) {
  const std::size_t per_day = static_cast<std::size_t>(ds.samples_per_day());
  const int days = static_cast<int>(ds.size() / per_day);
  const DaySplit d = apportion_days(days, spec);
  if (d.learn_days < 1 || d.validation_days < 1 || d.test_days < 1)
    throw Error("core_data: dataset of " + std::to_string(days) +
                " whole days is too short for three non-empty blocks");
  const std::size_t n_learn = per_day * static_cast<std::size_t>(d.learn_days);
  const std::size_t n_val = per_day * static_cast<std::size_t>(d.validation_days);
  return {ds.slice(0, n_learn), ds.slice(n_learn, n_val),
          ds.slice(n_learn + n_val, ds.size() - n_learn - n_val)};
}

/// Per-channel z-score statistics (sample standard deviation, n-1).
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t channels() const noexcept { return mean.size(); }
};

struct ChannelStats {
  double mean;
  double std;
};

inline ChannelStats channel_stats(std::span<const double> values, std::string_view channel) {
  if (values.size() < 2)
    throw Error("core_data: channel '" + std::string(channel) + "' needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
    throw Error("core_data: channel '" + std::string(channel) + "' is constant (zero variance)");
  return {mean, sd};
}

struct Normalized {
  std::vector<double> values;
  NormStats stats;
};

inline Normalized normalize(std::span<const double> values, std::string_view channel = "series") {
  const auto cs = channel_stats(values, channel);
  Normalized out;
  out.stats.mean = {cs.mean};
  out.stats.std = {cs.std};
  out.values.reserve(values.size());
  for (double v : values) out.values.push_back((v - cs.mean) / cs.std);
  return out;
}

inline std::vector<double> denormalize(std::span<const double> values, const NormStats& stats,
                                       std::size_t channel = 0) {
  if (channel >= stats.channels() || !(stats.std[channel] > 0.0))
    throw Error("core_data: invalid normalization statistics");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v * stats.std[channel] + stats.mean[channel]);
  return out;
}

}  // namespace heatcast
