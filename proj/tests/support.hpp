#pragma once

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <string>

#include "heatcast/heatcast.hpp"

namespace heatcast::test {

inline Date date(const char* s) {
  Date d;
  if (!parse_date(s, d)) throw Error(std::string("bad test date ") + s);
  return d;
}

// 2013-01-14 is a Monday.
inline constexpr const char* kMonday = "2013-01-14";

inline Dataset synthetic(int days, std::uint64_t seed, double noise_fraction = 0.03,
                         const ScheduleSet& sched = default_schedule()) {
  BuildingParams bp;
  bp.noise_std = noise_fraction * bp.p_max;
  bp.seed = seed;
  return generate(days, sched, bp, WeatherModel{}, 15, date(kMonday));
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Straight-line evaluation straight from the parameter layout: hidden unit k
// owns theta[k(l_x+1)] (bias) and the next l_x weights, the output block
// starts with its bias.
inline double reference_forward(const MlpParams& p, const double* x) {
  const auto& t = p.theta;
  const int stride = p.l_x + 1;
  const int out = p.l_w * stride;
  double y = t[out];
  for (int k = 0; k < p.l_w; ++k) {
    double a = t[k * stride];
    for (int j = 0; j < p.l_x; ++j) a += t[k * stride + 1 + j] * x[j];
    y += t[out + 1 + k] * std::tanh(a);
  }
  return y;
}

inline Eigen::MatrixXd central_difference_jacobian(const MlpParams& p, const Eigen::MatrixXd& x,
                                                   double h = 1e-6) {
  Eigen::MatrixXd jac(x.rows(), p.size());
  MlpParams q = p;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    q.theta(c) = p.theta(c) + h;
    const Eigen::VectorXd plus = predict(q, x);
    q.theta(c) = p.theta(c) - h;
    const Eigen::VectorXd minus = predict(q, x);
    q.theta(c) = p.theta(c);
    jac.col(c) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

// Largest |a - b| / max(1, |a|) over all entries.
inline double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ai = a.data()[i], bi = b.data()[i];
    worst = std::max(worst, std::abs(ai - bi) / std::max(1.0, std::abs(ai)));
  }
  return worst;
}

// Two-pass correlation in long double.
inline double reference_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  const long double d = n - 1;
  return static_cast<double>((cxy / d) / std::sqrt((cxx / d) * (cyy / d)));
}

inline std::string data_file(const char* name) { return std::string(HEATCAST_DATA_DIR) + "/" + name; }

}  // namespace heatcast::test
