#pragma once

// Versioned JSON model file. Doubles are written in shortest round-trip
// form, so a reloaded model predicts bit-identically.

#include <fstream>
#include <string>

#include "heatcast/mlp.hpp"
#include "heatcast/pipeline.hpp"
#include "json.hpp"

namespace heatcast {

inline constexpr int kModelFileVersion = 1;

struct ModelFile {
  int model_id = 1;
  MlpParams params;
  ModelScaling scaling;
  std::vector<std::string> column_names;
  PipelineConfig pipeline;
  TrainConfig train;
  StopReason stop_reason = StopReason::EpochLimit;
  int epochs_run = 0;
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"mu0", c.mu0},
          {"mu_increase", c.mu_increase},
          {"mu_decrease", c.mu_decrease},
          {"mu_max", c.mu_max},
          {"max_epochs", c.max_epochs},
          {"max_validation_failures", c.max_validation_failures},
          {"seed", c.seed},
          {"performance_goal", c.performance_goal},
          {"target_scale", c.target_scale}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.mu0 = j.value("mu0", c.mu0);
  c.mu_increase = j.value("mu_increase", c.mu_increase);
  c.mu_decrease = j.value("mu_decrease", c.mu_decrease);
  c.mu_max = j.value("mu_max", c.mu_max);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.max_validation_failures = j.value("max_validation_failures", c.max_validation_failures);
  c.seed = j.value("seed", c.seed);
  c.performance_goal = j.value("performance_goal", c.performance_goal);
  c.target_scale = j.value("target_scale", c.target_scale);
  return c;
}

inline nlohmann::json to_json(const ModelFile& m) {
  nlohmann::json j;
  j["format"] = "heatcast-model";
  j["version"] = kModelFileVersion;
  j["model_id"] = m.model_id;
  j["l_x"] = m.params.l_x;
  j["l_w"] = m.params.l_w;
  j["theta"] = std::vector<double>(m.params.theta.data(), m.params.theta.data() + m.params.theta.size());
  j["columns"] = m.column_names;
  j["input_norm"] = {{"mean", m.scaling.inputs.mean}, {"std", m.scaling.inputs.std}};
  j["target_norm"] = {{"mean", m.scaling.target.mean}, {"std", m.scaling.target.std}};
  j["split"] = {{"learn", m.pipeline.split.learn_fraction},
                {"validation", m.pipeline.split.validation_fraction},
                {"test", m.pipeline.split.test_fraction}};
  j["transitional"] = {{"beta0", m.pipeline.transitional.beta0},
                       {"delta_beta", m.pipeline.transitional.delta_beta}};
  j["train"] = to_json(m.train);
  j["stop_reason"] = to_string(m.stop_reason);
  j["epochs_run"] = m.epochs_run;
  return j;
}

inline ModelFile model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string{}) != "heatcast-model")
      throw Error("model_io: not a heatcast model file");
    if (j.at("version").get<int>() != kModelFileVersion)
      throw Error("model_io: unsupported model file version");
    ModelFile m;
    m.model_id = j.at("model_id").get<int>();
    m.params = MlpParams(j.at("l_x").get<int>(), j.at("l_w").get<int>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(theta.size()) != m.params.size())
      throw Error("model_io: theta length does not match l_x/l_w");
    for (std::size_t i = 0; i < theta.size(); ++i) m.params.theta(static_cast<Eigen::Index>(i)) = theta[i];
    m.column_names = j.at("columns").get<std::vector<std::string>>();
    m.scaling.inputs.mean = j.at("input_norm").at("mean").get<std::vector<double>>();
    m.scaling.inputs.std = j.at("input_norm").at("std").get<std::vector<double>>();
    m.scaling.target.mean = j.at("target_norm").at("mean").get<std::vector<double>>();
    m.scaling.target.std = j.at("target_norm").at("std").get<std::vector<double>>();
    if (m.scaling.inputs.channels() != static_cast<std::size_t>(m.params.l_x) ||
        m.scaling.target.channels() != 1)
      throw Error("model_io: normalization statistics do not match the network");
    m.pipeline.split.learn_fraction = j.at("split").at("learn").get<double>();
    m.pipeline.split.validation_fraction = j.at("split").at("validation").get<double>();
    m.pipeline.split.test_fraction = j.at("split").at("test").get<double>();
    m.pipeline.transitional.beta0 = j.at("transitional").at("beta0").get<double>();
    m.pipeline.transitional.delta_beta = j.at("transitional").at("delta_beta").get<double>();
    m.train = train_config_from_json(j.at("train"));
    m.epochs_run = j.value("epochs_run", 0);
    const std::string reason = j.value("stop_reason", "epoch_limit");
    for (StopReason r : {StopReason::EpochLimit, StopReason::PerformanceGoal, StopReason::MuOverflow,
                         StopReason::ValidationFailures})
      if (reason == to_string(r)) m.stop_reason = r;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model_io: malformed model file: ") + e.what());
  }
}

inline void save_model(const std::string& path, const ModelFile& m) {
  std::ofstream out(path);
  if (!out) throw Error("model_io: cannot write '" + path + "'");
  out << to_json(m).dump(2) << '\n';
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("model_io: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model_io: malformed JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace heatcast
