#pragma once

#include <stdexcept>
#include <string>

namespace heatcast {

/// Domain error raised by every module. The message carries the module
/// prefix so the CLI can print it verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure of the damped normal-equation solve inside a Levenberg-Marquardt
/// step.
class SolveError : public Error {
 public:
  SolveError(const std::string& what, double mu, double diag_min, double diag_max)
      : Error(what), mu_(mu), diag_min_(diag_min), diag_max_(diag_max) {}

  double mu() const noexcept { return mu_; }
  double diag_min() const noexcept { return diag_min_; }
  double diag_max() const noexcept { return diag_max_; }

 private:
  double mu_;
  double diag_min_;
  double diag_max_;
};

}  // namespace heatcast
