#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "powerhp/optimizers/step.hpp"
#include "powerhp/problems/problem.hpp"

// Single-loop Gaussian homotopy baselines on the plain smoothed objective
// F(mu, sigma) = E_{x, eps ~ N(0, I)} f_{mu + sigma eps}(x), with
//   grad_mu    ~ (1/KJ) sum_k sum_j grad f_{mu + sigma eps_k}(x_j)
//   grad_sigma ~ (1/KJ) sum_k sum_j grad f_{mu + sigma eps_k}(x_j) . eps_k
// Both variants take mu <- mu + lr grad_mu (ascent on f, i.e. descent on the loss).
//   SLGHr: sigma <- gamma sigma
//   SLGHd: sigma <- max(min(sigma - eta grad_sigma, gamma sigma), sigma_floor)

namespace powerhp {

struct SlghConfig {
  double lr = 1e-3;
  double sigma0 = 0.5;
  double gamma = 0.9999;
  int k_pop = 1;
  int j_batch = 32;
  // SLGHd only.
  double eta = 1e-3;
  double sigma_floor = 1e-6;

  void validate(const char* name) const {
    auto fail = [name](const char* what) { throw ConfigError(std::string(name) + "." + what); };
    if (!(lr > 0.0)) fail("lr must be > 0");
    if (!(sigma0 >= 0.0)) fail("sigma0 must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
    if (k_pop < 1) fail("k_pop must be >= 1");
    if (j_batch < 1) fail("j_batch must be >= 1");
    if (!(eta >= 0.0)) fail("eta must be >= 0");
    if (!(sigma_floor > 0.0)) fail("sigma_floor must be > 0");
  }
};

struct SmoothedGradients {
  Vector mu;
  double sigma = 0.0;
};

/// Monte Carlo estimates of (grad_mu F, grad_sigma F) at (mu, sigma): eps_k are
/// drawn from `noise` first, then the batch from `data`. For each k the batch
/// mean is formed first, then the K means are averaged.
template <StochasticProblem P>
SmoothedGradients slgh_grad_estimate(const P& problem, const Vector& mu, double sigma, int k_pop,
                                     int j_batch, RngStream& noise, RngStream& data) {
  const Eigen::Index d = problem.dim();
  std::vector<Vector> eps;
  eps.reserve(static_cast<std::size_t>(k_pop));
  for (int k = 0; k < k_pop; ++k) eps.push_back(noise.normal_vector(d));
  const auto batch = problem.sample_batch(data, static_cast<std::size_t>(j_batch));

  SmoothedGradients out{Vector::Zero(d), 0.0};
  Vector mean(d), scratch(d);
  for (const Vector& e : eps) {
    const Vector w = mu + sigma * e;
    batch_fitness_grad(problem, w, batch, mean, scratch);
    require_finite(mean, "fitness gradient");
    out.mu += mean;
    out.sigma += mean.dot(e);
  }
  if (k_pop > 1) {
    out.mu /= static_cast<double>(k_pop);
    out.sigma /= static_cast<double>(k_pop);
  }
  return out;
}

class Slgh {
 public:
  enum class Variant { kRatio, kDerivative };

  Slgh(SlghConfig cfg, Vector initial, Variant variant)
      : cfg_(cfg), variant_(variant), mu_(std::move(initial)), sigma_(cfg.sigma0) {
    cfg_.validate(variant == Variant::kRatio ? "slghr" : "slghd");
    if (variant_ == Variant::kDerivative) sigma_ = std::max(sigma_, cfg_.sigma_floor);
  }

  const Vector& point() const { return mu_; }
  std::int64_t t() const { return t_; }
  double sigma() const { return sigma_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const auto grads =
        slgh_grad_estimate(problem, mu_, sigma_, cfg_.k_pop, cfg_.j_batch, streams.noise, streams.data);
    Vector next = mu_ + cfg_.lr * grads.mu;
    require_finite(next, "iterate");
    StepRecord rec;
    rec.t = ++t_;
    rec.sigma_t = sigma_;
    rec.alpha_t = cfg_.lr;
    rec.grad_norm = grads.mu.norm();
    mu_ = std::move(next);
    if (variant_ == Variant::kRatio) {
      sigma_ = cfg_.gamma * sigma_;
    } else {
      require_finite(grads.sigma, "sigma gradient");
      sigma_ = std::max(std::min(sigma_ - cfg_.eta * grads.sigma, cfg_.gamma * sigma_), cfg_.sigma_floor);
    }
    return rec;
  }

 private:
  SlghConfig cfg_;
  Variant variant_;
  Vector mu_;
  double sigma_;
  std::int64_t t_ = 0;
};

}  // namespace powerhp
