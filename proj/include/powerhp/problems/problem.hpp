#pragma once

#include <concepts>
#include <cstddef>
#include <optional>

#include "powerhp/core/rng.hpp"
#include "powerhp/core/vector.hpp"

namespace powerhp {

/// Analytic certificate for a fitness function: f_w(x) <= max_fitness (M_f) and
/// |f_{w1}(x) - f_{w2}(x)| <= lipschitz * ||w1 - w2|| (L_0f) for all w, x.
struct BoundsHint {
  double max_fitness = 0.0;
  double lipschitz = 0.0;
};

/// Stochastic objective G(w) = E_x[f_w(x)] to be maximized.
///
/// Problems follow the maximization convention: benchmark problems expose
/// f = -loss, so f <= 0 wherever the loss is nonnegative. A Batch is an
/// indexable collection of data x_j drawn by sample_batch; fitness_grad
/// evaluates one datum and overwrites `grad` with the gradient in w.
template <class P>
concept StochasticProblem =
    requires(const P& p, const Vector& w, RngStream& rng, const typename P::Batch& batch,
             Vector& grad, std::size_t j) {
      typename P::Batch;
      { p.dim() } -> std::convertible_to<Eigen::Index>;
      { p.sample_batch(rng, j) } -> std::same_as<typename P::Batch>;
      { batch.size() } -> std::convertible_to<std::size_t>;
      { p.fitness(w, batch) } -> std::convertible_to<double>;
      { p.fitness_grad(w, batch, j, grad) } -> std::convertible_to<double>;
      { p.validation_score(w) } -> std::convertible_to<double>;
      { p.bounds_hint() } -> std::same_as<std::optional<BoundsHint>>;
    };

/// A StochasticProblem with a ground-truth quality metric (lower is better) used
/// for success accounting in benchmark protocols.
template <class P>
concept BenchmarkProblem = StochasticProblem<P> && requires(const P& p, const Vector& w) {
  { p.metric(w) } -> std::convertible_to<double>;
};

// Batch of `n` interchangeable data for problems whose fitness ignores x.
struct CountBatch {
  std::size_t n = 0;
  std::size_t size() const { return n; }
};

/// Mean fitness gradient over a batch: (1/J) sum_j grad_w f_w(x_j). Returns the
/// mean fitness. `scratch` must have dimension p.dim().
template <StochasticProblem P>
double batch_fitness_grad(const P& p, const Vector& w, const typename P::Batch& batch,
                          Vector& grad, Vector& scratch) {
  grad.setZero(p.dim());
  double total = 0.0;
  const std::size_t count = batch.size();
  for (std::size_t j = 0; j < count; ++j) {
    total += p.fitness_grad(w, batch, j, scratch);
    grad += scratch;
  }
  const double inv = 1.0 / static_cast<double>(count);
  grad *= inv;
  return total * inv;
}

}  // namespace powerhp
