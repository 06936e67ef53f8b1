#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "powerhp/core/schedule.hpp"
#include "powerhp/optimizers/step.hpp"
#include "powerhp/problems/problem.hpp"

namespace powerhp {

// Exponents N f below this are clamped before exponentiation; exp(-700) ~ 1e-304.
inline constexpr double kExponentFloor = -700.0;

struct PowerHPConfig {
  ScheduleConfig schedule;
  int k_pop = 4;
  int j_batch = 32;
  // Largest admissible exponent N f; anything above aborts the step.
  double exponent_clamp = 700.0;

  void validate() const {
    schedule.validate();
    if (k_pop < 1) throw ConfigError("PowerHPConfig.k_pop must be >= 1");
    if (j_batch < 1) throw ConfigError("PowerHPConfig.j_batch must be >= 1");
    if (!(exponent_clamp > 0.0) || exponent_clamp > 709.0) {
      throw ConfigError("PowerHPConfig.exponent_clamp must lie in (0, 709]");
    }
  }
};

/// N^2 e^{2 N M_f} L_0f^2: upper bound on the squared norm of any single
/// surrogate-gradient estimate when f <= M_f and f is L_0f-Lipschitz in w.
inline double estimate_sq_norm_bound(double power, const BoundsHint& hint) {
  return power * power * std::exp(2.0 * power * hint.max_fitness) * hint.lipschitz * hint.lipschitz;
}

namespace detail {

inline double power_weight(double power, double fitness, double exponent_clamp) {
  const double exponent = power * fitness;
  if (exponent > exponent_clamp) {
    std::ostringstream os;
    os << "power-transform exponent N*f = " << exponent << " exceeds bound " << exponent_clamp
       << " (N = " << power << ", f = " << fitness << ")";
    throw AbortError(os.str());
  }
  return power * std::exp(exponent < kExponentFloor ? kExponentFloor : exponent);
}

}  // namespace detail

/// Unbiased estimate of grad F_{N,sigma}(mu):
///   (1/KJ) sum_k sum_j N exp(N f_{w_k}(x_j)) grad_w f_{w_k}(x_j),
/// with w_k ~ N(mu, sigma^2 I) drawn from `noise` first and the batch {x_j} drawn
/// from `data` after.
template <StochasticProblem P>
Vector powerhp_grad_estimate(const P& problem, const Vector& mu, const SurrogateParams& params,
                             int k_pop, int j_batch, RngStream& noise, RngStream& data,
                             double exponent_clamp = 700.0) {
  params.validate();
  if (k_pop < 1 || j_batch < 1) throw ConfigError("powerhp_grad_estimate: K and J must be >= 1");
  const Eigen::Index d = problem.dim();
  std::vector<Vector> population;
  population.reserve(static_cast<std::size_t>(k_pop));
  for (int k = 0; k < k_pop; ++k) {
    Vector w = mu;
    for (Eigen::Index i = 0; i < d; ++i) w[i] += params.smoothing * noise.normal();
    population.push_back(std::move(w));
  }
  const auto batch = problem.sample_batch(data, static_cast<std::size_t>(j_batch));

  Vector estimate = Vector::Zero(d);
  Vector grad(d);
  for (const Vector& w : population) {
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const double f = problem.fitness_grad(w, batch, j, grad);
      if (!std::isfinite(f)) throw AbortError("fitness is not finite at a perturbed point");
      require_finite(grad, "fitness gradient");
      estimate += detail::power_weight(params.power, f, exponent_clamp) * grad;
    }
  }
  estimate /= static_cast<double>(k_pop) * static_cast<double>(batch.size());
  return estimate;
}

/// Progressive power homotopy: stochastic gradient ascent on F_{N_t, sigma_t}
/// with N_t, sigma_t, alpha_t taken from the closed-form schedules at step t.
class PowerHP {
 public:
  PowerHP(PowerHPConfig cfg, Vector initial) : cfg_(std::move(cfg)), mu_(std::move(initial)) {
    cfg_.validate();
    require_finite(mu_, "initial point");
  }

  const Vector& point() const { return mu_; }
  std::int64_t t() const { return t_; }
  const PowerHPConfig& config() const { return cfg_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const std::int64_t t = t_ + 1;
    const SurrogateParams params = surrogate_at(cfg_.schedule, t);
    const double alpha = learning_rate_at(cfg_.schedule, t);
    const Vector estimate = powerhp_grad_estimate(problem, mu_, params, cfg_.k_pop, cfg_.j_batch,
                                                  streams.noise, streams.data, cfg_.exponent_clamp);
    const double sq_norm = estimate.squaredNorm();
    if (const auto hint = problem.bounds_hint()) {
      const double bound = estimate_sq_norm_bound(params.power, *hint);
      if (sq_norm > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "estimate squared norm " << sq_norm << " exceeds certified bound " << bound;
        throw AbortError(os.str());
      }
    }
    Vector next = mu_ + alpha * estimate;
    require_finite(next, "iterate");
    mu_ = std::move(next);
    t_ = t;
    StepRecord rec;
    rec.t = t;
    rec.n_t = params.power;
    rec.sigma_t = params.smoothing;
    rec.alpha_t = alpha;
    rec.grad_norm = std::sqrt(sq_norm);
    return rec;
  }

 private:
  PowerHPConfig cfg_;
  Vector mu_;
  std::int64_t t_ = 0;
};

}  // namespace powerhp
