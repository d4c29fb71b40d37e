#pragma once

// Dataset -> normalized learn/validation/test matrices for one model variant.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "heatcast/core_data.hpp"
#include "heatcast/features.hpp"
#include "heatcast/schedules.hpp"

namespace heatcast {

struct PipelineConfig {
  SplitSpec split;
  TransitionalConfig transitional;
};

struct Block {
  Eigen::MatrixXd x;      // normalized inputs
  Eigen::VectorXd y;      // normalized target
  Eigen::VectorXd y_raw;  // kW
  std::vector<Timestamp> times;

  Eigen::Index rows() const { return x.rows(); }
};

/// Input and target statistics fitted on the learning block.
struct ModelScaling {
  NormStats inputs;
  NormStats target;  // single channel
};

struct PreparedData {
  int model_id = 1;
  int ts = 15;
  std::vector<std::string> column_names;
  ModelScaling scaling;
  Block learn;
  Block validation;
  Block test;
};

inline ModelScaling fit_scaling(const FeatureMatrix& learn) {
  ModelScaling s;
  for (Eigen::Index c = 0; c < learn.inputs.cols(); ++c) {
    const Eigen::VectorXd col = learn.inputs.col(c);
    const auto cs = channel_stats({col.data(), static_cast<std::size_t>(col.size())},
                                  learn.column_names[static_cast<std::size_t>(c)]);
    s.inputs.mean.push_back(cs.mean);
    s.inputs.std.push_back(cs.std);
  }
  const auto ts = channel_stats({learn.target.data(), static_cast<std::size_t>(learn.target.size())},
                                "heat_kw");
  s.target.mean = {ts.mean};
  s.target.std = {ts.std};
  return s;
}

inline Block apply_scaling(const FeatureMatrix& fm, const ModelScaling& s) {
  if (s.inputs.channels() != static_cast<std::size_t>(fm.inputs.cols()))
    throw Error("pipeline: scaling has " + std::to_string(s.inputs.channels()) +
                " channels, matrix has " + std::to_string(fm.inputs.cols()));
  Block b;
  b.x = fm.inputs;
  for (Eigen::Index c = 0; c < b.x.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    b.x.col(c) = (b.x.col(c).array() - s.inputs.mean[k]) / s.inputs.std[k];
  }
  b.y_raw = fm.target;
  b.y = (fm.target.array() - s.target.mean[0]) / s.target.std[0];
  b.times = fm.times;
  return b;
}

/// Splits by whole days, builds each block's features independently (each
/// block drops its own lag warm-up rows), and normalizes with learning-block
/// statistics. Pass `scaling` to reuse persisted statistics instead.
inline PreparedData prepare(const Dataset& ds, const ScheduleSet& sched, const PipelineConfig& cfg,
                            int model_id, const ModelScaling* scaling = nullptr) {
  const SplitBlocks blocks = split(ds, cfg.split);
  const FeatureMatrix learn = build_features(blocks.learn, sched, cfg.transitional, model_id);
  const FeatureMatrix val = build_features(blocks.validation, sched, cfg.transitional, model_id);
  const FeatureMatrix test = build_features(blocks.test, sched, cfg.transitional, model_id);

  PreparedData out;
  out.model_id = model_id;
  out.ts = ds.ts;
  out.column_names = learn.column_names;
  out.scaling = scaling ? *scaling : fit_scaling(learn);
  out.learn = apply_scaling(learn, out.scaling);
  out.validation = apply_scaling(val, out.scaling);
  out.test = apply_scaling(test, out.scaling);
  return out;
}

}  // namespace heatcast
