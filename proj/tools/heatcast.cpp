// heatcast: command-line front end for the forecasting pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "heatcast/heatcast.hpp"

namespace fs = std::filesystem;
using namespace heatcast;

namespace {

struct Options {
  std::string data;
  std::string schedule;
  std::string array;
  std::string model_file;
  std::string out;
  std::string output;
  std::uint64_t seed = 1;
  int jobs = 1;
  int model = 6;
  std::vector<int> models;
  int hidden = 9;

  // synth
  int days = 27;
  int ts = 15;
  std::string start = "2013-01-14";
  double noise = 0.03;

  // pipeline and training overrides
  double learn_frac = 0.70, val_frac = 0.15, test_frac = 0.15;
  double beta0 = 25.0, delta_beta = 25.0;
  double tau = 15.0, t_settle = 45.0, t_steady = 60.0;
  int epochs = 1000;
  double mu0 = 0.01;
  int max_fail = 6;
  int w_min = kMinHidden;
  int w_max = 0;
  int restarts = 5;
  int strength = 0;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv("HEATCAST_OUT");
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

// -o wins; otherwise the default name inside the output directory.
fs::path target(const Options& o, const std::string& name) {
  if (!o.output.empty()) {
    fs::path p = o.output;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }
  return out_dir(o) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

void write_json(const fs::path& p, const nlohmann::json& j) { open_out(p) << j.dump(2) << '\n'; }

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

ScheduleSet schedule_of(const Options& o) {
  return o.schedule.empty() ? default_schedule() : load_schedule(o.schedule);
}

Dataset data_of(const Options& o) {
  require(o.data, "--data");
  return load_csv(o.data);
}

PipelineConfig pipeline_of(const Options& o) {
  PipelineConfig p;
  p.split = {o.learn_frac, o.val_frac, o.test_frac};
  p.transitional = {o.beta0, o.delta_beta};
  return p;
}

TrainConfig train_of(const Options& o) {
  TrainConfig t;
  t.max_epochs = o.epochs;
  t.mu0 = o.mu0;
  t.max_validation_failures = o.max_fail;
  t.seed = o.seed;
  return t;
}

nlohmann::json to_json(const PhaseMetrics& m) {
  return {{"mse_modified", m.mse_modified},
          {"r2_modified", m.r2_modified},
          {"residual_ratio", m.residual_ratio},
          {"energy_error_pct", m.energy_error_pct},
          {"r_pred_actual", m.r_pred_actual}};
}

nlohmann::json to_json(const Evaluation& e) {
  return {{"learn", to_json(e.learn)}, {"validation", to_json(e.validation)}, {"test", to_json(e.test)}};
}

Eigen::VectorXd raw_prediction(const MlpParams& p, const PreparedData& d, const Block& b) {
  return predict(p, b.x).array() * d.scaling.target.std[0] + d.scaling.target.mean[0];
}

// --- subcommands -----------------------------------------------------------

int cmd_synth(const Options& o) {
  Date start;
  if (!parse_date(o.start, start)) throw Error("synth: bad --start date '" + o.start + "'");
  const ScheduleSet sched = schedule_of(o);
  BuildingParams bp;
  bp.noise_std = o.noise * bp.p_max;
  bp.seed = o.seed;
  bp.tau = o.tau;
  const WeatherModel wm;
  const Dataset ds = generate(o.days, sched, bp, wm, o.ts, start);
  const fs::path p = target(o, "data.csv");
  save_csv(p.string(), ds);
  write_json(fs::path(p.string() + ".truth.json"), truth_json(o.days, o.ts, start, sched, bp, wm));
  std::cout << ds.size() << " rows -> " << p.string() << '\n';
  return 0;
}

int cmd_features(const Options& o) {
  const Dataset ds = data_of(o);
  const auto band = pdl_bounds({o.tau, o.t_settle, o.t_steady}, ds.ts);
  const auto fm = build_features(ds, schedule_of(o), pipeline_of(o).transitional, o.model);
  const fs::path p = target(o, "features_m" + std::to_string(o.model) + ".csv");
  auto f = open_out(p);
  write_feature_csv(f, fm);
  std::cout << "model " << o.model << ": " << fm.rows() << " rows x " << fm.l_x << " inputs, lag band "
            << band.min << ".." << band.max << " -> " << p.string() << '\n';
  return 0;
}

int cmd_relevance(const Options& o) {
  const Dataset ds = data_of(o);
  const auto entries = relevance_report(ds, sample_schedules(schedule_of(o), ds));
  auto f = open_out(target(o, "relevance.csv"));
  f << "variable,r,band\n";
  for (const auto& e : entries) {
    f << e.variable << fmt(",%.6f,", e.r) << to_string(e.band) << '\n';
    std::cout << e.variable << ' ' << fmt("%+.4f", e.r) << ' ' << to_string(e.band) << '\n';
  }
  return 0;
}

int cmd_train(const Options& o) {
  const Dataset ds = data_of(o);
  const auto pipe = pipeline_of(o);
  const PreparedData data = prepare(ds, schedule_of(o), pipe, o.model);
  const RunRecord rec = train_and_evaluate(data, o.hidden, o.seed, train_of(o));
  if (!rec.ok) throw Error(rec.error);

  ModelFile mf;
  mf.model_id = o.model;
  mf.params = rec.params;
  mf.scaling = data.scaling;
  mf.column_names = data.column_names;
  mf.pipeline = pipe;
  mf.train = train_of(o);
  mf.stop_reason = rec.stop_reason;
  mf.epochs_run = rec.epochs_run;

  const fs::path dir = out_dir(o);
  const fs::path model_path = o.output.empty() ? dir / "model.json" : fs::path(o.output);
  save_model(model_path.string(), mf);
  write_json(dir / "train_metrics.json",
             {{"model_id", o.model},
              {"hidden", o.hidden},
              {"seed", o.seed},
              {"epochs_run", rec.epochs_run},
              {"best_epoch", rec.best_epoch},
              {"stop_reason", to_string(rec.stop_reason)},
              {"performance_goal", rec.performance_goal},
              {"metrics", to_json(rec.metrics)}});
  std::cout << "model " << o.model << " hidden " << o.hidden << ": validation r2 "
            << fmt("%.4f", rec.metrics.validation.r2_modified) << ", test r2 "
            << fmt("%.4f", rec.metrics.test.r2_modified) << " (" << to_string(rec.stop_reason) << " after "
            << rec.epochs_run << " epochs) -> " << model_path.string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  const Dataset ds = data_of(o);
  const ScheduleSet sched = schedule_of(o);
  const auto pipe = pipeline_of(o);
  std::vector<int> ids = o.models;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6};
  std::vector<PreparedData> prepared;
  for (int id : ids) prepared.push_back(prepare(ds, sched, pipe, id));

  SweepConfig sc;
  sc.w_min = o.w_min;
  if (o.w_max > 0) sc.w_cap = o.w_max;
  sc.seeds.resize(static_cast<std::size_t>(o.restarts));
  std::iota(sc.seeds.begin(), sc.seeds.end(), o.seed);
  sc.train = train_of(o);
  sc.jobs = o.jobs;
  const SweepResult res = sweep(prepared, sc);

  const fs::path dir = out_dir(o);
  const fs::path table = o.output.empty() ? dir / "sweep.csv" : fs::path(o.output);
  auto f = open_out(table);
  f << "model,hidden_neurons,r2_learn,r2_validation,r2_test,mse_learn,mse_validation,mse_test,"
       "energy_error_learn_pct,energy_error_validation_pct,seed,w_max\n";
  for (const auto& r : res.reports) {
    const auto& m = r.metrics;
    f << r.model_id << ',' << r.hidden_size << fmt(",%.6f", m.learn.r2_modified)
      << fmt(",%.6f", m.validation.r2_modified) << fmt(",%.6f", m.test.r2_modified)
      << fmt(",%.6f", m.learn.mse_modified) << fmt(",%.6f", m.validation.mse_modified)
      << fmt(",%.6f", m.test.mse_modified) << fmt(",%.4f", m.learn.energy_error_pct)
      << fmt(",%.4f", m.validation.energy_error_pct) << ',' << r.seed << ',' << r.w_max << '\n';
  }

  auto runs = nlohmann::json::array();
  for (const auto& r : res.runs) {
    nlohmann::json j = {{"model_id", r.model_id}, {"hidden", r.hidden}, {"seed", r.seed}, {"ok", r.ok}};
    if (r.ok) {
      j["epochs_run"] = r.epochs_run;
      j["stop_reason"] = to_string(r.stop_reason);
      j["metrics"] = to_json(r.metrics);
    } else {
      j["error"] = r.error;
    }
    runs.push_back(std::move(j));
  }
  write_json(dir / "sweep_runs.json", runs);
  for (const auto& r : res.reports)
    std::cout << "model " << r.model_id << ": hidden " << r.hidden_size << ", validation r2 "
              << fmt("%.4f", r.metrics.validation.r2_modified) << '\n';
  std::cout << "-> " << table.string() << '\n';
  return 0;
}

int cmd_oa_verify(const Options& o) {
  require(o.array, "--array");
  OrthogonalArray a = load_oa(o.array);
  if (o.strength > 0) a.strength = o.strength;
  const StrengthReport rep = verify_strength(a);
  if (!rep.passed) {
    std::string cols, tuple;
    for (std::size_t i = 0; i < rep.columns.size(); ++i) {
      cols += (i ? "," : "") + std::to_string(rep.columns[i] + 1);
      tuple += (i ? "," : "") + std::to_string(rep.tuple[i]);
    }
    throw Error("oa: strength " + std::to_string(rep.strength) + " fails on columns (" + cols +
                "): tuple (" + tuple + ") occurs " + std::to_string(rep.observed) + " times, expected " +
                std::to_string(rep.lambda));
  }
  std::cout << "strength " << rep.strength << " verified, \xCE\xBB=" << rep.lambda << '\n';
  return 0;
}

int cmd_oa_run(const Options& o) {
  require(o.array, "--array");
  const OrthogonalArray a = load_oa(o.array);
  const Dataset ds = data_of(o);
  RobustDesignConfig rc;
  rc.model_id = o.model;
  rc.hidden = o.hidden;
  rc.seed = o.seed;
  rc.train = train_of(o);
  rc.pipeline = pipeline_of(o);
  rc.jobs = o.jobs;
  const ScheduleSet base = schedule_of(o);
  const RobustDesignResult res = run_robust_design(a, base, ds, rc);

  const fs::path dir = out_dir(o);
  const fs::path table = o.output.empty() ? dir / "oa_outcomes.csv" : fs::path(o.output);
  auto f = open_out(table);
  f << "experiment";
  for (std::size_t k = 1; k <= kFactorCount; ++k) f << ",f" << k;
  f << ",r2_learn,r2_validation,r2_test,status\n";
  for (const auto& oc : res.outcomes) {
    f << oc.row_index;
    for (int l : oc.levels) f << ',' << l + 1;
    if (oc.ok)
      f << fmt(",%.6f", oc.metrics.learn.r2_modified) << fmt(",%.6f", oc.metrics.validation.r2_modified)
        << fmt(",%.6f", oc.metrics.test.r2_modified) << (oc.winner ? ",winner" : ",ok") << '\n';
    else
      f << ",,,,failed\n";
  }

  if (!res.winner) throw Error("oa: every experiment failed");
  const auto& w = res.outcomes[*res.winner];
  const ScheduleSet best = apply_shifts(base, FactorAssignment::from_levels(w.levels, ds.ts));
  write_json(dir / "oa_winner.json",
             {{"experiment", w.row_index},
              {"levels", [&] {
                 std::vector<int> v;
                 for (int l : w.levels) v.push_back(l + 1);
                 return v;
               }()},
              {"metrics", to_json(w.metrics)},
              {"schedule", heatcast::to_json(best)}});
  std::string lv;
  for (int l : w.levels) lv += static_cast<char>('1' + l);
  std::cout << "winner: experiment " << w.row_index << " (" << lv << "), validation r2 "
            << fmt("%.4f", w.metrics.validation.r2_modified) << " -> " << table.string() << '\n';
  return 0;
}

PreparedData replay(const Options& o, const ModelFile& mf) {
  return prepare(data_of(o), schedule_of(o), mf.pipeline, mf.model_id, &mf.scaling);
}

int cmd_predict(const Options& o) {
  require(o.model_file, "--model-file");
  const ModelFile mf = load_model(o.model_file);
  const PreparedData data = replay(o, mf);
  const Evaluation ev = evaluate(mf.params, data);
  const fs::path dir = out_dir(o);
  const fs::path csv = o.output.empty() ? dir / "predictions.csv" : fs::path(o.output);
  auto f = open_out(csv);
  write_prediction_csv(f, data.test.times, data.test.y_raw, raw_prediction(mf.params, data, data.test));
  write_json(dir / "predict_metrics.json", {{"model_id", mf.model_id}, {"metrics", to_json(ev)}});
  std::cout << "test r2 " << fmt("%.6f", ev.test.r2_modified) << ", mse " << fmt("%.6f", ev.test.mse_modified)
            << " -> " << csv.string() << '\n';
  return 0;
}

int cmd_report(const Options& o) {
  require(o.model_file, "--model-file");
  const ModelFile mf = load_model(o.model_file);
  const PreparedData data = replay(o, mf);
  const fs::path dir = out_dir(o);
  const int per_day = kMinutesPerDay / data.ts;
  for (const auto& [name, block] : {std::pair<std::string, const Block*>{"validation", &data.validation},
                                    std::pair<std::string, const Block*>{"test", &data.test}}) {
    const Eigen::VectorXd pred = raw_prediction(mf.params, data, *block);
    const std::string title = "Model " + std::to_string(mf.model_id) + ", " + name + " phase";
    const auto svg = svg_line_chart(
        title, {{"actual", "#1f77b4", &block->y_raw}, {"predicted", "#d62728", &pred}}, per_day);
    open_out(dir / ("report_" + name + ".svg")) << svg;
    auto f = open_out(dir / ("report_" + name + ".csv"));
    write_prediction_csv(f, block->times, block->y_raw, pred);
  }
  std::cout << "report_validation.svg, report_test.svg -> " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heatcast: short-horizon building heating demand forecasting"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with flag defaults (flags win)");
  Options o;

  app.add_option("--seed", o.seed, "Seed for data generation and training")->capture_default_str();
  app.add_option("--out", o.out, "Output directory (default $HEATCAST_OUT or .)");
  app.add_option("--jobs", o.jobs, "Parallel workers for sweep and oa-run")->check(CLI::PositiveNumber);

  auto data_flags = [&](CLI::App* c, bool model) {
    c->add_option("--data", o.data, "Dataset CSV")->check(CLI::ExistingFile);
    c->add_option("--schedule", o.schedule, "Schedule JSON (default: built-in)")->check(CLI::ExistingFile);
    c->add_option("-o,--output", o.output, "Primary output file");
    c->add_option("--learn-frac", o.learn_frac);
    c->add_option("--val-frac", o.val_frac);
    c->add_option("--test-frac", o.test_frac);
    c->add_option("--beta0", o.beta0);
    c->add_option("--delta-beta", o.delta_beta);
    if (model) c->add_option("--model", o.model, "Model variant")->check(CLI::Range(1, kModelCount));
  };
  auto train_flags = [&](CLI::App* c) {
    c->add_option("--epochs", o.epochs);
    c->add_option("--mu0", o.mu0);
    c->add_option("--max-fail", o.max_fail, "Validation failures before stopping");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and ground-truth sidecar");
  synth->add_option("--days", o.days)->check(CLI::PositiveNumber);
  synth->add_option("--ts", o.ts, "Sampling interval, minutes")->check(CLI::PositiveNumber);
  synth->add_option("--start", o.start, "First date, YYYY-MM-DD");
  synth->add_option("--noise", o.noise, "Demand noise std as a fraction of plant capacity");
  synth->add_option("--tau", o.tau, "Building time constant, minutes");
  synth->add_option("--schedule", o.schedule, "Schedule JSON (default: built-in)")->check(CLI::ExistingFile);
  synth->add_option("-o,--output", o.output, "Output CSV");

  auto* features = app.add_subcommand("features", "Write the input matrix for one model variant");
  data_flags(features, true);
  features->add_option("--tau", o.tau);
  features->add_option("--t-settle", o.t_settle);
  features->add_option("--t-steady", o.t_steady);

  auto* relevance = app.add_subcommand("relevance", "Pearson relevance of inputs against demand");
  data_flags(relevance, false);

  auto* train = app.add_subcommand("train", "Train one network and persist it");
  data_flags(train, true);
  train_flags(train);
  train->add_option("--hidden", o.hidden)->check(CLI::PositiveNumber);

  auto* sweep_cmd = app.add_subcommand("sweep", "Hidden-size sweep with DOF-adjusted selection");
  data_flags(sweep_cmd, false);
  train_flags(sweep_cmd);
  sweep_cmd->add_option("--model", o.models, "Model variants (default 1..6)")
      ->check(CLI::Range(1, kModelCount));
  sweep_cmd->add_option("--w-min", o.w_min)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--w-max", o.w_max, "Cap on the DOF-derived maximum hidden size");
  sweep_cmd->add_option("--restarts", o.restarts, "Seeds per hidden size")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("oa-verify", "Exhaustively verify an orthogonal array's strength");
  verify->add_option("--array", o.array)->check(CLI::ExistingFile);
  verify->add_option("--strength", o.strength, "Strength to check (default: declared or maximal)");

  auto* oa_run = app.add_subcommand("oa-run", "Robust-design search over schedule transitions");
  data_flags(oa_run, true);
  train_flags(oa_run);
  oa_run->add_option("--array", o.array)->check(CLI::ExistingFile);
  oa_run->add_option("--hidden", o.hidden)->check(CLI::PositiveNumber);

  auto* predict_cmd = app.add_subcommand("predict", "Apply a persisted model to the test block");
  predict_cmd->add_option("--model-file", o.model_file)->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", o.data)->check(CLI::ExistingFile);
  predict_cmd->add_option("--schedule", o.schedule)->check(CLI::ExistingFile);
  predict_cmd->add_option("-o,--output", o.output, "Prediction CSV");

  auto* report = app.add_subcommand("report", "SVG charts of actual vs predicted demand");
  report->add_option("--model-file", o.model_file)->check(CLI::ExistingFile);
  report->add_option("--data", o.data)->check(CLI::ExistingFile);
  report->add_option("--schedule", o.schedule)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*features) return cmd_features(o);
    if (*relevance) return cmd_relevance(o);
    if (*train) return cmd_train(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*verify) return cmd_oa_verify(o);
    if (*oa_run) return cmd_oa_run(o);
    if (*predict_cmd) return cmd_predict(o);
    if (*report) return cmd_report(o);
  } catch (const CLI::RequiredError& e) {
    std::cerr << "heatcast: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "heatcast: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
