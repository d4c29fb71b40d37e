#pragma once

// Orthogonal arrays: loading, exhaustive strength verification, and the
// robust-design runner over the ten schedule-transition factors.

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "heatcast/parallel.hpp"
#include "heatcast/pipeline.hpp"
#include "heatcast/schedules.hpp"
#include "heatcast/selection.hpp"

namespace heatcast {

/// OA(N, k, s, t): N rows over k factors with levels 0..s-1. A strength of 0
/// means the source declared none.
struct OrthogonalArray {
  int n_rows = 0;
  int n_factors = 0;
  int n_levels = 0;
  int strength = 0;
  std::vector<int> levels;  // row-major N x k

  int at(int row, int col) const { return levels[static_cast<std::size_t>(row * n_factors + col)]; }
  int& at(int row, int col) { return levels[static_cast<std::size_t>(row * n_factors + col)]; }

  std::vector<int> row(int r) const {
    return {levels.begin() + r * n_factors, levels.begin() + (r + 1) * n_factors};
  }
};

namespace detail {
inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

inline int parse_level(const std::string& tok, int line_no) {
  int v = 0;
  if (!parse_int(tok, v))
    throw Error("oa: line " + std::to_string(line_no) + ": bad level '" + tok + "'");
  return v;
}
}  // namespace detail

/// Format: optional header `N k s t`, then N rows of k levels, either
/// whitespace-separated or as one contiguous run of digits. Without a header
/// N and k come from the data, s is inferred as max level + 1, and t is 0.
inline OrthogonalArray parse_oa(std::istream& in) {
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = detail::tokens(line);
    if (!t.empty()) lines.emplace_back(no, std::move(t));
  }
  if (lines.empty()) throw Error("oa: empty array file");

  OrthogonalArray a;
  std::optional<std::array<int, 4>> header;
  if (lines.front().second.size() == 4) {
    std::array<int, 4> h{};
    bool numeric = true;
    for (int i = 0; i < 4; ++i) numeric = numeric && detail::parse_int(lines.front().second[i], h[i]);
    if (numeric && h[0] == static_cast<int>(lines.size()) - 1) header = h;
  }
  std::size_t first = header ? 1 : 0;

  for (std::size_t li = first; li < lines.size(); ++li) {
    const auto& [no, toks] = lines[li];
    std::vector<int> row;
    const bool contiguous = toks.size() == 1 && toks[0].size() > 1 &&
                            (!header || static_cast<int>(toks[0].size()) == (*header)[1]);
    if (contiguous) {
      for (char c : toks[0]) {
        if (c < '0' || c > '9')
          throw Error("oa: line " + std::to_string(no) + ": bad level character");
        row.push_back(c - '0');
      }
    } else {
      for (const auto& t : toks) row.push_back(detail::parse_level(t, no));
    }
    if (a.n_factors == 0) a.n_factors = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != a.n_factors)
      throw Error("oa: line " + std::to_string(no) + ": ragged row (" + std::to_string(row.size()) +
                  " levels, expected " + std::to_string(a.n_factors) + ")");
    a.levels.insert(a.levels.end(), row.begin(), row.end());
    ++a.n_rows;
  }
  if (a.n_rows == 0) throw Error("oa: array has no rows");

  if (header) {
    const auto& h = *header;
    if (h[0] != a.n_rows)
      throw Error("oa: header declares " + std::to_string(h[0]) + " rows, found " +
                  std::to_string(a.n_rows));
    if (h[1] != a.n_factors)
      throw Error("oa: header declares " + std::to_string(h[1]) + " factors, rows have " +
                  std::to_string(a.n_factors));
    if (h[2] < 2 || h[3] < 0 || h[3] > h[1]) throw Error("oa: invalid header");
    a.n_levels = h[2];
    a.strength = h[3];
  } else {
    int mx = 0;
    for (int v : a.levels) mx = std::max(mx, v);
    a.n_levels = mx + 1;
  }
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const int v = a.levels[i];
    if (v < 0 || v >= a.n_levels)
      throw Error("oa: level " + std::to_string(v) + " out of range 0.." +
                  std::to_string(a.n_levels - 1) + " at row " +
                  std::to_string(i / static_cast<std::size_t>(a.n_factors) + 1));
  }
  return a;
}

inline OrthogonalArray load_oa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("oa: cannot open '" + path + "'");
  return parse_oa(in);
}

inline void write_oa(std::ostream& out, const OrthogonalArray& a) {
  out << a.n_rows << ' ' << a.n_factors << ' ' << a.n_levels << ' ' << a.strength << '\n';
  for (int r = 0; r < a.n_rows; ++r) {
    for (int c = 0; c < a.n_factors; ++c) out << (c ? " " : "") << a.at(r, c);
    out << '\n';
  }
}

struct StrengthReport {
  bool passed = false;
  int strength = 0;
  long lambda = 0;  // N / s^t
  std::size_t subsets_checked = 0;
  // First violation, when !passed.
  std::vector<int> columns;
  std::vector<int> tuple;
  long observed = 0;
};

/// Counts every level tuple in every t-column projection and checks that
/// each occurs exactly N / s^t times.
inline StrengthReport verify_strength(const OrthogonalArray& a, int t) {
  StrengthReport rep;
  rep.strength = t;
  if (t < 0 || t > a.n_factors) return rep;
  long cells = 1;
  for (int i = 0; i < t; ++i) cells *= a.n_levels;
  if (a.n_rows % cells != 0) {
    rep.lambda = 0;
    return rep;
  }
  rep.lambda = a.n_rows / cells;

  std::vector<int> cols(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) cols[static_cast<std::size_t>(i)] = i;
  std::vector<long> counts(static_cast<std::size_t>(cells));
  for (;;) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int r = 0; r < a.n_rows; ++r) {
      long idx = 0;
      for (int c : cols) idx = idx * a.n_levels + a.at(r, c);
      ++counts[static_cast<std::size_t>(idx)];
    }
    ++rep.subsets_checked;
    for (long idx = 0; idx < cells; ++idx) {
      if (counts[static_cast<std::size_t>(idx)] != rep.lambda) {
        rep.columns = cols;
        rep.tuple.assign(static_cast<std::size_t>(t), 0);
        long rest = idx;
        for (int i = t - 1; i >= 0; --i) {
          rep.tuple[static_cast<std::size_t>(i)] = static_cast<int>(rest % a.n_levels);
          rest /= a.n_levels;
        }
        rep.observed = counts[static_cast<std::size_t>(idx)];
        return rep;
      }
    }
    // next combination in lexicographic order
    int i = t - 1;
    while (i >= 0 && cols[static_cast<std::size_t>(i)] == a.n_factors - t + i) --i;
    if (i < 0) break;
    ++cols[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) cols[static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j - 1)] + 1;
  }
  rep.passed = true;
  return rep;
}

/// Checks the declared strength, or, when none is declared, the largest
/// strength the array attains.
inline StrengthReport verify_strength(const OrthogonalArray& a) {
  if (a.strength > 0) return verify_strength(a, a.strength);
  StrengthReport best = verify_strength(a, 1);
  if (!best.passed) return best;
  for (int t = 2; t <= a.n_factors; ++t) {
    auto rep = verify_strength(a, t);
    if (!rep.passed) break;
    best = rep;
  }
  return best;
}

struct ExperimentOutcome {
  int row_index = 0;        // 1-based experiment number
  std::vector<int> levels;  // 0-based array levels
  bool ok = false;
  bool winner = false;
  std::string error;
  Evaluation metrics;
};

struct RobustDesignConfig {
  int model_id = 6;
  int hidden = 9;
  std::uint64_t seed = 1;
  TrainConfig train;
  PipelineConfig pipeline;
  double delta = kDefaultDelta;
  int jobs = 1;
};

struct RobustDesignResult {
  std::vector<ExperimentOutcome> outcomes;
  std::optional<std::size_t> winner;  // index into outcomes
};

/// Evaluates one schedule the way every array row is evaluated.
inline RunRecord evaluate_schedule(const Dataset& ds, const ScheduleSet& sched,
                                   const RobustDesignConfig& cfg) {
  const PreparedData data = prepare(ds, sched, cfg.pipeline, cfg.model_id);
  return train_and_evaluate(data, cfg.hidden, cfg.seed, cfg.train, cfg.delta);
}

/// One training run per array row with the row's shifted schedules. The
/// winner maximizes validation r2 (ties: learning r2, then lower row).
/// Rows whose shifts collide are recorded as failed outcomes.
inline RobustDesignResult run_robust_design(const OrthogonalArray& a, const ScheduleSet& base,
                                            const Dataset& ds, const RobustDesignConfig& cfg) {
  if (a.n_factors != static_cast<int>(kFactorCount) || a.n_levels != 3)
    throw Error("oa: robust design needs a 10-factor, 3-level array");

  RobustDesignResult res;
  res.outcomes.resize(static_cast<std::size_t>(a.n_rows));
  parallel_for(res.outcomes.size(), cfg.jobs, [&](std::size_t i) {
    auto& o = res.outcomes[i];
    o.row_index = static_cast<int>(i) + 1;
    o.levels = a.row(static_cast<int>(i));
    try {
      const auto shifted = apply_shifts(base, FactorAssignment::from_levels(o.levels, ds.ts));
      const RunRecord rec = evaluate_schedule(ds, shifted, cfg);
      o.ok = rec.ok;
      o.error = rec.error;
      o.metrics = rec.metrics;
    } catch (const Error& e) {
      o.ok = false;
      o.error = e.what();
    }
  });

  for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
    const auto& o = res.outcomes[i];
    if (!o.ok) continue;
    if (!res.winner) {
      res.winner = i;
      continue;
    }
    const auto& w = res.outcomes[*res.winner].metrics;
    const double v = o.metrics.validation.r2_modified, wv = w.validation.r2_modified;
    if (v > wv || (v == wv && o.metrics.learn.r2_modified > w.learn.r2_modified)) res.winner = i;
  }
  if (res.winner) res.outcomes[*res.winner].winner = true;
  return res;
}

}  // namespace heatcast
