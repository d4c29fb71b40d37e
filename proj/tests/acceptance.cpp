// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 5 ...    run the listed criteria
// Exit status is non-zero when any selected criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

#include "cli_util.hpp"
#include "support.hpp"

using namespace heatcast;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Analytic Jacobian against central differences.
Verdict jacobian_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> lx(5, 10), lw(3, 13);
  double worst = 0.0;
  for (int net = 0; net < 20; ++net) {
    MlpParams p(lx(rng), lw(rng));
    p.theta = test::random_matrix(p.size(), 1, rng);
    const Eigen::MatrixXd x = test::random_matrix(25, p.l_x, rng, -2, 2);
    worst = std::max(worst, test::max_relative_error(jacobian(p, x), test::central_difference_jacobian(p, x)));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 10.0, fmt("max relative error %.2e over 20 networks, %.2f s", worst, secs)};
}

// 2. LM reaches the DOF-scaled goal on a noiseless linear target.
Verdict lm_sanity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  const Eigen::MatrixXd x = test::random_matrix(200, 3, rng);
  const Eigen::MatrixXd xv = test::random_matrix(100, 3, rng);
  const Eigen::Vector3d w(120.0, -80.0, 45.0);
  const Eigen::VectorXd y_raw = (x * w).array() + 500.0;
  const Eigen::VectorXd yv_raw = (xv * w).array() + 500.0;
  const auto stats = channel_stats({y_raw.data(), 200}, "target");
  const Eigen::VectorXd y = (y_raw.array() - stats.mean) / stats.std;
  const Eigen::VectorXd yv = (yv_raw.array() - stats.mean) / stats.std;

  const int hidden = 5;
  const DofSpec dof = dof_spec(200, 3, hidden);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.performance_goal = performance_goal({y_raw.data(), 200}, dof);
  cfg.target_scale = stats.std;
  int reached = 0;
  std::string epochs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const auto r = train(x, y, xv, yv, hidden, cfg);
    const double raw_sse = r.learn_cost.empty() ? 1e300 : 2.0 * 200 * r.learn_cost.back() * stats.std * stats.std;
    const bool ok = r.stop_reason == StopReason::PerformanceGoal && raw_sse <= cfg.performance_goal;
    reached += ok;
    epochs += (epochs.empty() ? "" : ",") + std::to_string(r.epochs_run) + (ok ? "" : "x");
  }
  const double secs = seconds_since(t0);
  return {reached >= 4 && secs < 5.0,
          std::to_string(reached) + "/5 seeds reached the goal " + fmt("%.1f", cfg.performance_goal) +
              " (epochs " + epochs + "), " + fmt("%.2f s", secs)};
}

// 3. DOF arithmetic against hand evaluation.
Verdict dof_arithmetic() {
  const long l_theta = dof_spec(1824, 5, 10).l_theta;
  const int w_max = max_hidden(1824, 5);
  const long want_theta = (5 + 1) * 10 + (10 + 1) * 1;
  const int want_w = (1824 - 1) / (8 * (5 + 1 + 1));
  return {l_theta == 71 && l_theta == want_theta && w_max == 32 && w_max == want_w,
          "L_theta=" + std::to_string(l_theta) + ", W_max=" + std::to_string(w_max)};
}

// 4. r2_modified = 1 - mse_modified (m-1)/m on zero-mean unit-sample-std
// targets.
Verdict metric_consistency() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> len(50, 2000);
  std::normal_distribution<double> g;
  double worst = 0.0, worst_alt = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = len(rng);
    std::vector<double> raw(static_cast<std::size_t>(m)), pred(static_cast<std::size_t>(m));
    for (auto& v : raw) v = g(rng);
    const auto y = normalize(raw).values;
    for (auto& v : pred) v = g(rng);
    const DofSpec dof = dof_spec(m, 5, 3);
    const auto mm = modified_metrics(pred, y, dof);
    const double md = m;
    worst = std::max(worst, std::abs(mm.r2_modified - (1.0 - mm.mse_modified * (md - 1) / md)));
    worst_alt = std::max(worst_alt, std::abs(mm.r2_modified - (1.0 - mm.mse_modified * md / (md - 1))));
  }
  return {worst <= 1e-9, fmt("max |r2 - (1 - mse(m-1)/m)| = %.3e; with m/(m-1) instead: %.3e", worst, worst_alt)};
}

// 5. Bundled OA strength and perturbation sensitivity.
Verdict oa_verification() {
  const auto t0 = Clock::now();
  const auto a = load_oa(test::data_file("oa_729_10_3_5.txt"));
  const auto rep = verify_strength(a, 5);
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> row(0, a.n_rows - 1), col(0, a.n_factors - 1), bump(1, 2);
  int caught = 0;
  for (int k = 0; k < 100; ++k) {
    auto b = a;
    const int r = row(rng), c = col(rng);
    b.at(r, c) = (b.at(r, c) + bump(rng)) % 3;
    caught += !verify_strength(b, 5).passed;
  }
  const double secs = seconds_since(t0);
  return {rep.passed && rep.lambda == 3 && caught == 100 && secs < 5.0,
          std::string(rep.passed ? "strength 5 verified" : "strength 5 FAILED") + ", lambda=" +
              std::to_string(rep.lambda) + ", " + std::to_string(caught) + "/100 perturbations rejected, " +
              fmt("%.2f s", secs)};
}

// 6. Staircase on levels 1, 2, 1, 3.
Verdict transitional_oracle() {
  const std::vector<double> levels{1, 2, 1, 3};
  const auto beta = transitional_series(levels, {25.0, 25.0});
  std::vector<double> want{25.0};
  for (std::size_t i = 1; i < levels.size(); ++i)
    want.push_back(want.back() + 2 * 25.0 * std::abs(levels[i] - levels[i - 1]));
  std::string got;
  for (double b : beta) got += (got.empty() ? "" : ", ") + fmt("%g", b);
  return {beta == want && beta == std::vector<double>{25, 75, 125, 225}, "levels " + got};
}

// 7. Model 6 beats model 1 on synthetic data.
Verdict pseudo_dynamic_trend() {
  const auto t0 = Clock::now();
  int wins = 0;
  std::string gaps;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset ds = test::synthetic(27, seed, 0.03);
    std::vector<PreparedData> models{prepare(ds, default_schedule(), {}, 1), prepare(ds, default_schedule(), {}, 6)};
    SweepConfig cfg;
    cfg.w_cap = 13;
    cfg.jobs = 4;
    const auto res = sweep(models, cfg);
    const double gap = res.reports.at(1).metrics.validation.r2_modified - res.reports.at(0).metrics.validation.r2_modified;
    wins += gap >= 0.03;
    gaps += (gaps.empty() ? "" : ", ") + fmt("%+.3f", gap);
  }
  const double secs = seconds_since(t0);
  return {wins >= 4 && secs <= 600.0,
          std::to_string(wins) + "/5 seeds with gap >= 0.03 (gaps " + gaps + "), " + fmt("%.1f s", secs)};
}

// 8. Robust design recovers a +15 min shift of t5.
Verdict oa_schedule_recovery() {
  const auto t0 = Clock::now();
  const auto a = load_oa(test::data_file("oa_81_10_3_2.txt"));
  if (!verify_strength(a, 2).passed) return {false, "OA(81,10,3,2) failed its strength check"};
  FactorAssignment shift;
  shift.shifts[4] = 15;
  const ScheduleSet truth = apply_shifts(default_schedule(), shift);
  std::vector<int> truth_levels(kFactorCount, 1);
  truth_levels[4] = 2;

  int recovered = 0;
  std::string winners;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset ds = test::synthetic(27, seed, 0.03, truth);
    RobustDesignConfig cfg;
    cfg.jobs = 4;
    const auto res = run_robust_design(a, default_schedule(), ds, cfg);
    if (!res.winner) {
      winners += " none";
      continue;
    }
    const auto& w = res.outcomes[*res.winner];
    int matches = 0;
    for (std::size_t f = 0; f < kFactorCount; ++f) matches += w.levels[f] == truth_levels[f];
    recovered += w.levels[4] == 2 && matches >= 7;
    std::string lv;
    for (int l : w.levels) lv += static_cast<char>('1' + l);
    winners += " " + lv + "(" + std::to_string(matches) + ")";
  }
  const double secs = seconds_since(t0);
  return {recovered >= 3 && secs <= 1800.0,
          std::to_string(recovered) + "/5 seeds recovered; winners" + winners + ", " + fmt("%.1f s", secs)};
}

// 9. Byte-identical CLI outputs across repeated runs.
Verdict cli_determinism() {
  const auto dir = test::scratch("acceptance_c9");
  const auto data = (dir / "data.csv").string();
  if (test::run_cli("synth --days 10 --seed 5 -o " + data).exit_code != 0) return {false, "synth failed"};
  const std::string sweep = "sweep --model 1 --model 6 --w-max 5 --restarts 2 --jobs 2 --seed 3 --data " + data;
  const std::string oa = "oa-run --jobs 2 --seed 3 --array " + test::data_file("oa_81_10_3_2.txt") + " --data " + data;
  bool ok = true;
  std::string detail;
  for (const auto& [name, cmd, file] : {std::tuple<std::string, std::string, std::string>{"sweep", sweep, "sweep.csv"},
                                        {"oa-run", oa, "oa_outcomes.csv"}}) {
    const auto a = dir / (name + "_a"), b = dir / (name + "_b");
    const bool ran = test::run_cli(cmd + " --out " + a.string()).exit_code == 0 &&
                     test::run_cli(cmd + " --out " + b.string()).exit_code == 0;
    const auto ta = test::slurp(a / file);
    const bool same = ran && !ta.empty() && ta == test::slurp(b / file);
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + name + (same ? " identical" : " DIFFERS");
  }
  fs::remove_all(dir);
  return {ok, detail};
}

// 10. Pearson against a long-double two-pass oracle, and band boundaries.
Verdict pearson_oracle() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> len(2, 10000);
  std::uniform_real_distribution<double> coupling(-2, 2), offset(-100, 100), scale(0.01, 50);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<std::size_t>(len(rng));
    const double c = coupling(rng), ox = offset(rng), oy = offset(rng), sx = scale(rng), sy = scale(rng);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = g(rng);
      x[i] = ox + sx * z;
      y[i] = oy + sy * (c * z + g(rng));
    }
    worst = std::max(worst, std::abs(pearson(x, y) - test::reference_pearson(x, y)));
  }
  const bool bands = band(0.1) == RelevanceBand::Negligible && band(0.25) == RelevanceBand::SmallPos &&
                     band(0.6) == RelevanceBand::MediumPos &&
                     band(std::nextafter(0.1, 1.0)) == RelevanceBand::SmallPos &&
                     band(std::nextafter(0.25, 1.0)) == RelevanceBand::MediumPos &&
                     band(std::nextafter(0.6, 1.0)) == RelevanceBand::StrongPos;
  return {worst <= 1e-12 && bands,
          fmt("max deviation %.2e over 1000 series; ", worst) + (bands ? "boundary bands match" : "boundary bands WRONG")};
}

const std::map<int, std::pair<const char*, std::function<Verdict()>>> kCriteria{
    {1, {"Jacobian correctness", jacobian_correctness}},
    {2, {"LM sanity", lm_sanity}},
    {3, {"DOF arithmetic", dof_arithmetic}},
    {4, {"metric consistency", metric_consistency}},
    {5, {"OA verification", oa_verification}},
    {6, {"transitional oracle", transitional_oracle}},
    {7, {"pseudo-dynamic trend", pseudo_dynamic_trend}},
    {8, {"OA schedule recovery", oa_schedule_recovery}},
    {9, {"CLI determinism", cli_determinism}},
    {10, {"Pearson oracle", pearson_oracle}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [id, _] : kCriteria) selected.push_back(id);

  int failed = 0;
  for (int id : selected) {
    const auto it = kCriteria.find(id);
    if (it == kCriteria.end()) {
      std::printf("criterion %d: FAIL (unknown criterion)\n", id);
      ++failed;
      continue;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s - %s\n", id, it->second.first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
