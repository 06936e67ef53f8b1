#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>

#include "powerhp/core/errors.hpp"

namespace powerhp {

/// (N, sigma) pair defining the power-transformed, Gaussian-smoothed surrogate
///   F_{N,sigma}(mu) = E_{x, w ~ N(mu, sigma^2 I)} [exp(N f_w(x))].
struct SurrogateParams {
  double power = 1.0;
  double smoothing = 1.0;

  void validate() const {
    if (!(power > 0.0)) throw ConfigError("SurrogateParams.power must be > 0");
    if (!(smoothing > 0.0)) throw ConfigError("SurrogateParams.smoothing must be > 0");
  }
};

/// Homotopy trajectory: power rises from n0 towards n0 + delta through a geometric
/// increment schedule phi_t = (1 - q) q^{t-1}, the smoothing radius decays as
/// b + sigma0 beta^t, and the step size is alpha_scale * t^{-(1/2 + gamma)}.
///
/// sigma0 = 0 is accepted (degenerate, constant smoothing b); every other field is
/// checked by validate().
struct ScheduleConfig {
  double n0 = 1.0;
  double delta = 0.0;
  double sigma0 = 1.0;
  double b = 0.01;
  double beta = 0.999;
  double gamma = 0.05;
  double phi_ratio = 0.99;
  double alpha_scale = 1.0;

  void validate() const {
    auto fail = [](const char* field, const char* rule) {
      std::ostringstream os;
      os << "ScheduleConfig." << field << " " << rule;
      throw ConfigError(os.str());
    };
    if (!(n0 > 0.0)) fail("n0", "must be > 0");
    if (!(delta >= 0.0)) fail("delta", "must be >= 0");
    if (!(sigma0 >= 0.0)) fail("sigma0", "must be >= 0");
    if (!(b > 0.0)) fail("b", "must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) fail("beta", "must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 0.5)) fail("gamma", "must lie in (0, 1/2)");
    if (!(phi_ratio > 0.0 && phi_ratio < 1.0)) fail("phi_ratio", "must lie in (0, 1)");
    if (!(alpha_scale > 0.0)) fail("alpha_scale", "must be > 0");
  }
};

// Ratio q such that 99% of the power increment is applied by step horizon / 2.
inline double default_phi_ratio(std::int64_t horizon) {
  if (horizon < 2) return 0.5;
  return std::pow(0.01, 2.0 / static_cast<double>(horizon));
}

// phi_t = (1 - q) q^{t-1}; positive and summing to one over t >= 1.
inline double phi_at(const ScheduleConfig& cfg, std::int64_t t) {
  return (1.0 - cfg.phi_ratio) * std::pow(cfg.phi_ratio, static_cast<double>(t - 1));
}

// N_t = N_0 + delta * (1 - q^t).
inline double power_at(const ScheduleConfig& cfg, std::int64_t t) {
  return cfg.n0 + cfg.delta * -std::expm1(static_cast<double>(t) * std::log(cfg.phi_ratio));
}

// sigma_t = b + sigma_0 beta^t.
inline double smoothing_at(const ScheduleConfig& cfg, std::int64_t t) {
  return cfg.b + cfg.sigma0 * std::pow(cfg.beta, static_cast<double>(t));
}

// alpha_t = alpha_scale * t^{-(1/2 + gamma)}.
inline double learning_rate_at(const ScheduleConfig& cfg, std::int64_t t) {
  return cfg.alpha_scale * std::pow(static_cast<double>(t), -(0.5 + cfg.gamma));
}

inline SurrogateParams surrogate_at(const ScheduleConfig& cfg, std::int64_t t) {
  return {power_at(cfg, t), smoothing_at(cfg, t)};
}

}  // namespace powerhp
