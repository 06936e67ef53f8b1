#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "powerhp/core/rng.hpp"

namespace powerhp {

/// One optimizer step. Fields that do not apply to a method (e.g. the power for a
/// plain SGD step) are NaN.
struct StepRecord {
  std::int64_t t = 0;
  double n_t = std::numeric_limits<double>::quiet_NaN();
  double sigma_t = std::numeric_limits<double>::quiet_NaN();
  double alpha_t = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> validation;

  bool operator==(const StepRecord& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    return t == o.t && same(n_t, o.n_t) && same(sigma_t, o.sigma_t) && same(alpha_t, o.alpha_t) &&
           same(grad_norm, o.grad_norm) && validation == o.validation;
  }
};

/// Random streams owned by one (method, trial) run: `data` drives mini-batch
/// sampling and is shared in value across methods of a trial; `noise` drives
/// parameter perturbations and is private to the method.
struct StepStreams {
  RngStream data;
  RngStream noise;
};

}  // namespace powerhp
