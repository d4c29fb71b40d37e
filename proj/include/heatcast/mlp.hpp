#pragma once

// Single-hidden-layer perceptron (tanh hidden units, linear output) trained
// in batch mode with Levenberg-Marquardt.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "heatcast/error.hpp"

namespace heatcast {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Parameter count of a single-hidden-layer network.
constexpr long parameter_count(long l_x, long l_w, long l_y = 1) {
  return (l_x + 1) * l_w + (l_w + 1) * l_y;
}

/// Flattened parameter vector theta. Layout: the hidden block row by row,
/// each row [bias, w_1..w_lx]; then the output row [bias, v_1..v_lw].
struct MlpParams {
  int l_x = 0;
  int l_w = 0;
  Eigen::VectorXd theta;

  MlpParams() = default;
  MlpParams(int inputs, int hidden) : l_x(inputs), l_w(hidden) {
    if (inputs < 1 || hidden < 0) throw Error("mlp: invalid network dimensions");
    theta = Eigen::VectorXd::Zero(parameter_count(inputs, hidden));
  }

  Eigen::Index size() const { return theta.size(); }
  Eigen::Index output_offset() const { return static_cast<Eigen::Index>(l_w) * (l_x + 1); }

  /// l_w x (l_x + 1), bias in column 0.
  Eigen::Map<const RowMajorMatrix> w_in() const {
    return {theta.data(), l_w, l_x + 1};
  }
  Eigen::Map<RowMajorMatrix> w_in() { return {theta.data(), l_w, l_x + 1}; }

  /// 1 x (l_w + 1), bias first.
  Eigen::Map<const Eigen::RowVectorXd> w_out() const {
    return {theta.data() + output_offset(), l_w + 1};
  }
  Eigen::Map<Eigen::RowVectorXd> w_out() { return {theta.data() + output_offset(), l_w + 1}; }

  bool finite() const { return theta.allFinite(); }
};

/// Uniform [-0.5, 0.5) initialization from a 64-bit Mersenne twister. The
/// mantissa is drawn directly from the engine output so the stream is
/// identical across standard library implementations.
inline MlpParams init_params(int l_x, int l_w, std::uint64_t seed) {
  MlpParams p(l_x, l_w);
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p.theta(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return p;
}

namespace detail {
inline void check_inputs(const MlpParams& p, Eigen::Index cols) {
  if (cols != p.l_x)
    throw Error("mlp: input width " + std::to_string(cols) + " does not match l_x=" +
                std::to_string(p.l_x));
}

/// tanh activations of the hidden layer, rows = samples.
inline Eigen::MatrixXd hidden_activations(const MlpParams& p, const Eigen::MatrixXd& x) {
  const auto w = p.w_in();
  Eigen::MatrixXd a = x * w.rightCols(p.l_x).transpose();
  a.rowwise() += w.col(0).transpose();
  return a.array().tanh().matrix();
}
}  // namespace detail

inline double forward(const MlpParams& p, std::span<const double> x) {
  if (static_cast<long>(x.size()) != p.l_x)
    throw Error("mlp: input length " + std::to_string(x.size()) + " does not match l_x=" +
                std::to_string(p.l_x));
  const auto w = p.w_in();
  const auto v = p.w_out();
  double y = v(0);
  for (int k = 0; k < p.l_w; ++k) {
    double a = w(k, 0);
    for (int i = 0; i < p.l_x; ++i) a += w(k, i + 1) * x[static_cast<std::size_t>(i)];
    y += v(k + 1) * std::tanh(a);
  }
  return y;
}

/// Batch prediction, one output per row of `x`.
inline Eigen::VectorXd predict(const MlpParams& p, const Eigen::MatrixXd& x) {
  detail::check_inputs(p, x.cols());
  const Eigen::MatrixXd h = detail::hidden_activations(p, x);
  const auto v = p.w_out();
  Eigen::VectorXd y = h * v.tail(p.l_w).transpose();
  y.array() += v(0);
  return y;
}

/// J(theta) = (1/2m) * sum (y - y_a)^2.
inline double cost(const MlpParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& y_actual) {
  if (x.rows() == 0) throw Error("mlp: cost of an empty dataset");
  if (x.rows() != y_actual.size()) throw Error("mlp: input and target row counts differ");
  const Eigen::VectorXd e = predict(p, x) - y_actual;
  return e.squaredNorm() / (2.0 * static_cast<double>(x.rows()));
}

/// m x L_theta matrix of d(y_l - y_a_l)/d(theta), by the chain rule through
/// the tanh layer.
inline Eigen::MatrixXd jacobian(const MlpParams& p, const Eigen::MatrixXd& x) {
  detail::check_inputs(p, x.cols());
  const Eigen::Index m = x.rows();
  const Eigen::MatrixXd h = detail::hidden_activations(p, x);
  const auto v = p.w_out();
  // d y / d a_k = v_k (1 - h_k^2)
  Eigen::MatrixXd dk = (1.0 - h.array().square()).matrix();
  for (int k = 0; k < p.l_w; ++k) dk.col(k) *= v(k + 1);

  Eigen::MatrixXd jac(m, p.size());
  const Eigen::Index stride = p.l_x + 1;
  for (int k = 0; k < p.l_w; ++k) {
    const Eigen::Index base = k * stride;
    jac.col(base) = dk.col(k);
    jac.middleCols(base + 1, p.l_x) = (x.array().colwise() * dk.col(k).array()).matrix();
  }
  const Eigen::Index out = p.output_offset();
  jac.col(out).setOnes();
  jac.middleCols(out + 1, p.l_w) = h;
  return jac;
}

namespace detail {
/// Solves (J^T J + mu I) delta = J^T e by Cholesky.
inline Eigen::VectorXd damped_solve(const Eigen::MatrixXd& jtj, const Eigen::VectorXd& jte,
                                    double mu) {
  Eigen::MatrixXd a = jtj;
  a.diagonal().array() += mu;
  const double dmin = a.diagonal().minCoeff();
  const double dmax = a.diagonal().maxCoeff();
  if (!a.allFinite() || !jte.allFinite())
    throw SolveError("mlp: non-finite damped normal equations (mu=" + std::to_string(mu) + ")",
                     mu, dmin, dmax);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw SolveError("mlp: damped normal equations not positive definite (mu=" +
                         std::to_string(mu) + ", diag in [" + std::to_string(dmin) + ", " +
                         std::to_string(dmax) + "])",
                     mu, dmin, dmax);
  Eigen::VectorXd delta = llt.solve(jte);
  if (!delta.allFinite())
    throw SolveError("mlp: non-finite step (mu=" + std::to_string(mu) + ")", mu, dmin, dmax);
  return delta;
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& jac) {
  Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(jac.cols(), jac.cols());
  jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
  jtj.triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
  return jtj;
}
}  // namespace detail

struct LmStep {
  MlpParams params;
  double cost = 0.0;
};

/// One damped Gauss-Newton update:
/// theta' = theta - (J^T J + mu I)^-1 J^T e with e = y - y_a.
inline LmStep lm_step(const MlpParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& y_actual,
                      double mu) {
  if (!(mu > 0.0)) throw Error("mlp: damping mu must be positive");
  if (x.rows() != y_actual.size()) throw Error("mlp: input and target row counts differ");
  const Eigen::MatrixXd jac = jacobian(p, x);
  const Eigen::VectorXd e = predict(p, x) - y_actual;
  LmStep out{p, 0.0};
  out.params.theta -= detail::damped_solve(detail::gram(jac), jac.transpose() * e, mu);
  out.cost = cost(out.params, x, y_actual);
  return out;
}

struct TrainConfig {
  double mu0 = 0.01;
  double mu_increase = 10.0;
  double mu_decrease = 0.1;
  double mu_max = 1e10;
  int max_epochs = 1000;
  int max_validation_failures = 6;
  std::uint64_t seed = 1;
  /// Raw-unit sum of squared learning errors at which training stops; 0
  /// disables the criterion.
  double performance_goal = 0.0;
  /// Standard deviation of the raw learning target, used to convert the
  /// normalized residuals back to raw units for the goal test.
  double target_scale = 1.0;
};

inline void validate(const TrainConfig& c) {
  if (!(c.mu0 > 0.0 && c.mu0 < c.mu_max)) throw Error("mlp: require 0 < mu0 < mu_max");
  if (!(c.mu_decrease < 1.0 && c.mu_decrease > 0.0 && c.mu_increase > 1.0))
    throw Error("mlp: require 0 < mu_decrease < 1 < mu_increase");
  if (c.max_epochs < 0 || c.max_validation_failures < 1)
    throw Error("mlp: invalid epoch or validation-failure budget");
  if (!(c.target_scale > 0.0)) throw Error("mlp: target_scale must be positive");
}

enum class StopReason { EpochLimit, PerformanceGoal, MuOverflow, ValidationFailures };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::EpochLimit: return "epoch_limit";
    case StopReason::PerformanceGoal: return "performance_goal";
    case StopReason::MuOverflow: return "mu_overflow";
    case StopReason::ValidationFailures: return "validation_failures";
  }
  return "unknown";
}

struct TrainResult {
  MlpParams params;  // parameters of the best validation epoch
  int epochs_run = 0;
  int best_epoch = 0;
  StopReason stop_reason = StopReason::EpochLimit;
  std::vector<double> learn_cost;  // one entry per accepted epoch
  std::vector<double> validation_cost;
  double final_mu = 0.0;
};

/// Batch Levenberg-Marquardt. A candidate is accepted when it lowers the
/// learning cost (mu shrinks), otherwise mu grows and the step is retried.
/// Each accepted step is one epoch and is followed by a validation check;
/// the returned parameters are those with the lowest validation cost seen.
inline TrainResult train(const Eigen::MatrixXd& x_learn, const Eigen::VectorXd& y_learn,
                         const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val, int hidden,
                         const TrainConfig& cfg) {
  validate(cfg);
  if (x_learn.rows() == 0 || x_val.rows() == 0)
    throw Error("mlp: learning and validation sets must be non-empty");
  if (x_learn.cols() != x_val.cols()) throw Error("mlp: learning/validation widths differ");

  const int l_x = static_cast<int>(x_learn.cols());
  const double m = static_cast<double>(x_learn.rows());
  const double raw_sse_per_cost = 2.0 * m * cfg.target_scale * cfg.target_scale;

  MlpParams current = init_params(l_x, hidden, cfg.seed);
  double learn = cost(current, x_learn, y_learn);
  double best_val = cost(current, x_val, y_val);

  TrainResult result;
  result.params = current;
  double mu = cfg.mu0;
  int failures = 0;

  for (;;) {
    if (learn * raw_sse_per_cost <= cfg.performance_goal) {
      result.stop_reason = StopReason::PerformanceGoal;
      break;
    }
    if (result.epochs_run >= cfg.max_epochs) {
      result.stop_reason = StopReason::EpochLimit;
      break;
    }

    const Eigen::MatrixXd jac = jacobian(current, x_learn);
    const Eigen::VectorXd e = predict(current, x_learn) - y_learn;
    const Eigen::MatrixXd jtj = detail::gram(jac);
    const Eigen::VectorXd jte = jac.transpose() * e;

    bool accepted = false;
    bool overflow = false;
    while (!accepted) {
      MlpParams candidate = current;
      candidate.theta -= detail::damped_solve(jtj, jte, mu);
      const double c = cost(candidate, x_learn, y_learn);
      if (std::isfinite(c) && c < learn) {
        current = std::move(candidate);
        learn = c;
        mu *= cfg.mu_decrease;
        accepted = true;
      } else {
        mu *= cfg.mu_increase;
        if (!(mu <= cfg.mu_max)) {
          overflow = true;
          break;
        }
      }
    }
    if (overflow) {
      result.stop_reason = StopReason::MuOverflow;
      break;
    }

    ++result.epochs_run;
    const double val = cost(current, x_val, y_val);
    result.learn_cost.push_back(learn);
    result.validation_cost.push_back(val);
    if (val < best_val) {
      best_val = val;
      result.params = current;
      result.best_epoch = result.epochs_run;
      failures = 0;
    } else if (++failures >= cfg.max_validation_failures) {
      result.stop_reason = StopReason::ValidationFailures;
      break;
    }
  }
  result.final_mu = mu;
  return result;
}

}  // namespace heatcast
