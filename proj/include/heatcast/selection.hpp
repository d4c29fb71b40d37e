#pragma once

// Degree-of-freedom accounting, DOF-adjusted metrics and the hidden-size
// sweep used to pick each model's configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "heatcast/mlp.hpp"
#include "heatcast/parallel.hpp"
#include "heatcast/pipeline.hpp"
#include "heatcast/relevance.hpp"

namespace heatcast {

inline constexpr double kDefaultDelta = 8.0;
inline constexpr int kMinHidden = 3;

struct DofSpec {
  long l_e = 0;      // learning equations, m * l_y
  long l_theta = 0;  // model parameters
  long dof = 0;
  double delta = kDefaultDelta;
  int w_max = 0;
  int w_min = kMinHidden;
};

/// Largest hidden size keeping the parameter count within l_e / delta:
/// floor((l_e - l_y) / (delta * (l_x + l_y + 1))).
inline int max_hidden(long m_learn, int l_x, int l_y = 1, double delta = kDefaultDelta) {
  if (m_learn < 1) throw Error("selection: learning set must be non-empty");
  if (!(delta > 0.0)) throw Error("selection: delta must be positive");
  const long l_e = m_learn * l_y;
  return static_cast<int>(std::floor(static_cast<double>(l_e - l_y) / (delta * (l_x + l_y + 1))));
}

inline DofSpec dof_spec(long m_learn, int l_x, int l_w, int l_y = 1, double delta = kDefaultDelta) {
  DofSpec d;
  d.l_e = m_learn * l_y;
  d.l_theta = parameter_count(l_x, l_w, l_y);
  d.dof = d.l_e - d.l_theta;
  d.delta = delta;
  d.w_max = max_hidden(m_learn, l_x, l_y, delta);
  if (d.dof < 1)
    throw Error("selection: model over-parameterized (l_e=" + std::to_string(d.l_e) +
                ", l_theta=" + std::to_string(d.l_theta) + ")");
  return d;
}

struct ModifiedMetrics {
  double mse_modified = 0.0;
  double r2_modified = 0.0;
  /// The printed DOF-scaled residual ratio; r2_modified is its complement.
  double residual_ratio = 0.0;
};

/// mse = l_e/(dof m) * SSE; ratio = l_e/dof * SSE / sum(y_a^2); r2 = 1 - ratio.
/// Inputs are in normalized units; m is the length of the evaluated series.
inline ModifiedMetrics modified_metrics(std::span<const double> y_pred,
                                        std::span<const double> y_actual, const DofSpec& dof) {
  if (y_pred.size() != y_actual.size() || y_pred.empty())
    throw Error("selection: prediction and target lengths must match and be non-empty");
  if (dof.dof < 1) throw Error("selection: dof must be at least 1");
  double sse = 0.0, ssa = 0.0;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    sse += (y_pred[i] - y_actual[i]) * (y_pred[i] - y_actual[i]);
    ssa += y_actual[i] * y_actual[i];
  }
  if (!(ssa > 0.0)) throw Error("selection: sum of squared targets is zero");
  const double scale = static_cast<double>(dof.l_e) / static_cast<double>(dof.dof);
  ModifiedMetrics out;
  out.mse_modified = scale * sse / static_cast<double>(y_pred.size());
  out.residual_ratio = scale * sse / ssa;
  out.r2_modified = 1.0 - out.residual_ratio;
  return out;
}

/// Percentage gap between integrated predicted and actual energy (kWh).
inline double energy_error(std::span<const double> y_pred_raw, std::span<const double> y_actual_raw,
                           int ts) {
  if (y_pred_raw.size() != y_actual_raw.size())
    throw Error("selection: prediction and target lengths differ");
  if (ts <= 0) throw Error("selection: sampling interval must be positive");
  const double hours = ts / 60.0;
  double e_pred = 0.0, e_actual = 0.0;
  for (std::size_t i = 0; i < y_pred_raw.size(); ++i) {
    e_pred += y_pred_raw[i] * hours;
    e_actual += y_actual_raw[i] * hours;
  }
  if (!(e_actual > 0.0)) throw Error("selection: actual energy must be positive");
  return 100.0 * std::abs(e_pred - e_actual) / e_actual;
}

/// DOF-scaled performance goal on raw learning targets:
/// 0.01 * dof * sum(y_a) / l_e.
inline double performance_goal(std::span<const double> y_raw_learn, const DofSpec& dof) {
  double sum = 0.0;
  for (double y : y_raw_learn) sum += y;
  return 0.01 * static_cast<double>(dof.dof) * sum / static_cast<double>(dof.l_e);
}

struct PhaseMetrics {
  double mse_modified = 0.0;
  double r2_modified = 0.0;
  double residual_ratio = 0.0;
  double energy_error_pct = 0.0;
  double r_pred_actual = 0.0;  // Pearson r of raw prediction vs actual
};

struct Evaluation {
  PhaseMetrics learn;
  PhaseMetrics validation;
  PhaseMetrics test;
};

namespace detail {
inline std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline PhaseMetrics phase_metrics(const MlpParams& params, const Block& b, const DofSpec& dof,
                                  const ModelScaling& s, int ts) {
  const Eigen::VectorXd pred = predict(params, b.x);
  const Eigen::VectorXd pred_raw = pred.array() * s.target.std[0] + s.target.mean[0];
  const auto mm = modified_metrics(view(pred), view(b.y), dof);
  PhaseMetrics out;
  out.mse_modified = mm.mse_modified;
  out.r2_modified = mm.r2_modified;
  out.residual_ratio = mm.residual_ratio;
  out.energy_error_pct = energy_error(view(pred_raw), view(b.y_raw), ts);
  try {
    out.r_pred_actual = pearson(view(pred_raw), view(b.y_raw), "prediction", "actual");
  } catch (const Error&) {
    out.r_pred_actual = 0.0;  // constant prediction
  }
  return out;
}
}  // namespace detail

/// DOF spec of a trained network on its learning block.
inline DofSpec dof_for(const PreparedData& data, int hidden, double delta = kDefaultDelta) {
  return dof_spec(data.learn.rows(), static_cast<int>(data.learn.x.cols()), hidden, 1, delta);
}

/// Metrics for every phase. All phases use the learning-block DOF spec.
inline Evaluation evaluate(const MlpParams& params, const PreparedData& data,
                           double delta = kDefaultDelta) {
  const DofSpec dof = dof_for(data, params.l_w, delta);
  return {detail::phase_metrics(params, data.learn, dof, data.scaling, data.ts),
          detail::phase_metrics(params, data.validation, dof, data.scaling, data.ts),
          detail::phase_metrics(params, data.test, dof, data.scaling, data.ts)};
}

struct RunRecord {
  int model_id = 0;
  int hidden = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int epochs_run = 0;
  int best_epoch = 0;
  StopReason stop_reason = StopReason::EpochLimit;
  double performance_goal = 0.0;
  Evaluation metrics;
  MlpParams params;
};

/// Trains one network with the DOF-scaled goal and evaluates it. Errors are
/// captured in the record rather than thrown.
inline RunRecord train_and_evaluate(const PreparedData& data, int hidden, std::uint64_t seed,
                                    TrainConfig cfg, double delta = kDefaultDelta) {
  RunRecord rec;
  rec.model_id = data.model_id;
  rec.hidden = hidden;
  rec.seed = seed;
  try {
    const DofSpec dof = dof_for(data, hidden, delta);
    cfg.seed = seed;
    cfg.performance_goal = performance_goal(detail::view(data.learn.y_raw), dof);
    cfg.target_scale = data.scaling.target.std[0];
    rec.performance_goal = cfg.performance_goal;
    const TrainResult tr =
        train(data.learn.x, data.learn.y, data.validation.x, data.validation.y, hidden, cfg);
    rec.epochs_run = tr.epochs_run;
    rec.best_epoch = tr.best_epoch;
    rec.stop_reason = tr.stop_reason;
    rec.params = tr.params;
    rec.metrics = evaluate(tr.params, data, delta);
    rec.ok = true;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

struct ModelReport {
  int model_id = 0;
  int hidden_size = 0;
  std::uint64_t seed = 0;
  int w_max = 0;
  Evaluation metrics;
};

struct SweepConfig {
  int w_min = kMinHidden;
  std::optional<int> w_cap;  // further clamps the DOF-derived W_max
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  TrainConfig train;
  double delta = kDefaultDelta;
  int jobs = 1;
};

struct SweepResult {
  std::vector<RunRecord> runs;        // ordered by (model, hidden, seed)
  std::vector<ModelReport> per_size;  // best seed per (model, hidden)
  std::vector<ModelReport> reports;   // one per model
};

namespace detail {
/// Best-seed order: validation r2 desc, validation mse asc, seed asc.
inline bool better_run(const RunRecord& a, const RunRecord& b) {
  const auto& va = a.metrics.validation;
  const auto& vb = b.metrics.validation;
  if (va.r2_modified != vb.r2_modified) return va.r2_modified > vb.r2_modified;
  if (va.mse_modified != vb.mse_modified) return va.mse_modified < vb.mse_modified;
  return a.seed < b.seed;
}

/// Size order: validation r2 desc, learning r2 desc, fewer hidden units.
inline bool better_size(const ModelReport& a, const ModelReport& b) {
  const double va = a.metrics.validation.r2_modified, vb = b.metrics.validation.r2_modified;
  if (va != vb) return va > vb;
  const double la = a.metrics.learn.r2_modified, lb = b.metrics.learn.r2_modified;
  if (la != lb) return la > lb;
  return a.hidden_size < b.hidden_size;
}
}  // namespace detail

/// Hidden sizes [w_min, min(W_max, w_cap)] x seeds for every prepared model.
/// Failed runs are kept in `runs` and skipped during selection.
inline SweepResult sweep(const std::vector<PreparedData>& models, const SweepConfig& cfg) {
  if (cfg.seeds.empty()) throw Error("selection: sweep needs at least one seed");
  struct Task {
    std::size_t model;
    int hidden;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<int> w_max(models.size());
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const auto& d = models[mi];
    int hi = max_hidden(d.learn.rows(), static_cast<int>(d.learn.x.cols()), 1, cfg.delta);
    w_max[mi] = hi;
    if (cfg.w_cap) hi = std::min(hi, *cfg.w_cap);
    if (hi < cfg.w_min)
      throw Error("selection: model " + std::to_string(d.model_id) + " has W_max=" +
                  std::to_string(hi) + " below the minimum hidden size " +
                  std::to_string(cfg.w_min));
    for (int h = cfg.w_min; h <= hi; ++h)
      for (auto s : cfg.seeds) tasks.push_back({mi, h, s});
  }

  SweepResult out;
  out.runs.resize(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const auto& t = tasks[i];
    out.runs[i] = train_and_evaluate(models[t.model], t.hidden, t.seed, cfg.train, cfg.delta);
  });

  // Tasks were enumerated in (model, hidden, seed) order, so groups are
  // contiguous.
  std::size_t i = 0;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    std::optional<ModelReport> best_model;
    while (i < tasks.size() && tasks[i].model == mi) {
      const int h = tasks[i].hidden;
      const RunRecord* best = nullptr;
      for (; i < tasks.size() && tasks[i].model == mi && tasks[i].hidden == h; ++i) {
        const auto& r = out.runs[i];
        if (r.ok && (!best || detail::better_run(r, *best))) best = &r;
      }
      if (!best) continue;
      ModelReport rep{best->model_id, h, best->seed, w_max[mi], best->metrics};
      out.per_size.push_back(rep);
      if (!best_model || detail::better_size(rep, *best_model)) best_model = rep;
    }
    if (best_model) out.reports.push_back(*best_model);
  }
  return out;
}

}  // namespace heatcast
