#pragma once

#include <cmath>
#include <cstdint>

#include "powerhp/optimizers/step.hpp"
#include "powerhp/problems/problem.hpp"

// First-order baselines. All of them descend the loss -f using the mini-batch
// gradient g = -(1/J) sum_j grad_w f_w(x_j):
//   SGD       theta <- theta - lr g
//   Momentum  v <- m v + g;  theta <- theta - lr v
//   Adam      m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
//             theta <- theta - lr mhat / (sqrt(vhat) + eps), bias-corrected
//   AdamW     theta <- theta (1 - lr wd), then the Adam update
//   SAM       e = rho g / ||g||; theta <- theta - lr g(theta + e), same batch

namespace powerhp {

struct SgdConfig {
  double lr = 1e-3;
  int j_batch = 32;
  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("sgd.lr must be > 0");
    if (j_batch < 1) throw ConfigError("sgd.j_batch must be >= 1");
  }
};

struct MomentumConfig {
  double lr = 1e-3;
  double momentum = 0.9;
  int j_batch = 32;
  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("momentum.lr must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum.momentum must lie in [0, 1)");
    if (j_batch < 1) throw ConfigError("momentum.j_batch must be >= 1");
  }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled; used by AdamW only
  int j_batch = 32;
  void validate(const char* name = "adam") const {
    auto fail = [name](const char* what) { throw ConfigError(std::string(name) + "." + what); };
    if (!(lr > 0.0)) fail("lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
    if (!(eps > 0.0)) fail("eps must be > 0");
    if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
    if (j_batch < 1) fail("j_batch must be >= 1");
  }
};

struct SamConfig {
  double lr = 1e-3;
  double rho = 0.05;
  int j_batch = 32;
  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("sam.lr must be > 0");
    if (!(rho >= 0.0)) throw ConfigError("sam.rho must be >= 0");
    if (j_batch < 1) throw ConfigError("sam.j_batch must be >= 1");
  }
};

namespace detail {

// Mini-batch loss gradient -(1/J) sum_j grad f; returns the gradient norm.
template <StochasticProblem P>
double loss_gradient(const P& problem, const Vector& theta, const typename P::Batch& batch,
                     Vector& g, Vector& scratch) {
  batch_fitness_grad(problem, theta, batch, g, scratch);
  g = -g;
  require_finite(g, "mini-batch gradient");
  return g.norm();
}

inline StepRecord first_order_record(std::int64_t t, double lr, double grad_norm) {
  StepRecord rec;
  rec.t = t;
  rec.alpha_t = lr;
  rec.grad_norm = grad_norm;
  return rec;
}

}  // namespace detail

class Sgd {
 public:
  Sgd(SgdConfig cfg, Vector initial) : cfg_(cfg), theta_(std::move(initial)) { cfg_.validate(); }
  const Vector& point() const { return theta_; }
  std::int64_t t() const { return t_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const auto batch = problem.sample_batch(streams.data, static_cast<std::size_t>(cfg_.j_batch));
    const double norm = detail::loss_gradient(problem, theta_, batch, g_, scratch_);
    Vector next = theta_ - cfg_.lr * g_;
    require_finite(next, "iterate");
    theta_ = std::move(next);
    return detail::first_order_record(++t_, cfg_.lr, norm);
  }

 private:
  SgdConfig cfg_;
  Vector theta_, g_, scratch_;
  std::int64_t t_ = 0;
};

class Momentum {
 public:
  Momentum(MomentumConfig cfg, Vector initial)
      : cfg_(cfg), theta_(std::move(initial)), velocity_(Vector::Zero(theta_.size())) {
    cfg_.validate();
  }
  const Vector& point() const { return theta_; }
  std::int64_t t() const { return t_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const auto batch = problem.sample_batch(streams.data, static_cast<std::size_t>(cfg_.j_batch));
    const double norm = detail::loss_gradient(problem, theta_, batch, g_, scratch_);
    velocity_ = cfg_.momentum * velocity_ + g_;
    Vector next = theta_ - cfg_.lr * velocity_;
    require_finite(next, "iterate");
    theta_ = std::move(next);
    return detail::first_order_record(++t_, cfg_.lr, norm);
  }

 private:
  MomentumConfig cfg_;
  Vector theta_, velocity_, g_, scratch_;
  std::int64_t t_ = 0;
};

/// Adam; with weight_decay > 0 and `decoupled` set this is AdamW.
class Adam {
 public:
  Adam(AdamConfig cfg, Vector initial, bool decoupled = false)
      : cfg_(cfg),
        decoupled_(decoupled),
        theta_(std::move(initial)),
        m_(Vector::Zero(theta_.size())),
        v_(Vector::Zero(theta_.size())) {
    cfg_.validate(decoupled ? "adamw" : "adam");
  }
  const Vector& point() const { return theta_; }
  std::int64_t t() const { return t_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const auto batch = problem.sample_batch(streams.data, static_cast<std::size_t>(cfg_.j_batch));
    const double norm = detail::loss_gradient(problem, theta_, batch, g_, scratch_);
    const std::int64_t t = t_ + 1;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * g_;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * g_.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t));
    Vector next = theta_;
    if (decoupled_) next *= 1.0 - cfg_.lr * cfg_.weight_decay;
    next.array() -= cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
    require_finite(next, "iterate");
    theta_ = std::move(next);
    t_ = t;
    return detail::first_order_record(t, cfg_.lr, norm);
  }

 private:
  AdamConfig cfg_;
  bool decoupled_;
  Vector theta_, m_, v_, g_, scratch_;
  std::int64_t t_ = 0;
};

class Sam {
 public:
  Sam(SamConfig cfg, Vector initial) : cfg_(cfg), theta_(std::move(initial)) { cfg_.validate(); }
  const Vector& point() const { return theta_; }
  std::int64_t t() const { return t_; }

  template <StochasticProblem P>
  StepRecord step(const P& problem, StepStreams& streams) {
    const auto batch = problem.sample_batch(streams.data, static_cast<std::size_t>(cfg_.j_batch));
    const double norm = detail::loss_gradient(problem, theta_, batch, g_, scratch_);
    if (norm > 0.0) {
      const Vector perturbed = theta_ + (cfg_.rho / norm) * g_;
      detail::loss_gradient(problem, perturbed, batch, g_, scratch_);
    }
    Vector next = theta_ - cfg_.lr * g_;
    require_finite(next, "iterate");
    theta_ = std::move(next);
    return detail::first_order_record(++t_, cfg_.lr, norm);
  }

 private:
  SamConfig cfg_;
  Vector theta_, g_, scratch_;
  std::int64_t t_ = 0;
};

}  // namespace powerhp
