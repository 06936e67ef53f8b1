#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powerhp/problems/problem.hpp"

namespace powerhp {

/// Real-valued phase retrieval from measurements y_n = <a_n, x0>; only y_n^2 is
/// informative, so x0 is identifiable up to sign.
///
/// Rows of `sensing` are the a_n. The validation rows are fresh measurements of
/// the same x0 held out from training and used only for the validation score.
struct PhaseRetrievalInstance {
  Vector x0;
  Matrix sensing;
  Vector y;
  Matrix validation_sensing;
  Vector validation_y;

  Eigen::Index dim() const { return x0.size(); }
  Eigen::Index n_samples() const { return sensing.rows(); }
};

// Per-measurement loss (<a,x>^2 - y^2)^2.
inline double pr_sample_loss(const Eigen::Ref<const Vector>& a, double y, const Vector& x) {
  const double ax = a.dot(x);
  const double r = ax * ax - y * y;
  return r * r;
}

/// Mean of (<a_n,x>^2 - y_n^2)^2 over the given measurement indices.
inline double pr_loss(const PhaseRetrievalInstance& inst, const Vector& x,
                      std::span<const std::size_t> batch_idx) {
  if (batch_idx.empty()) throw ConfigError("pr_loss: empty batch");
  if (x.size() != inst.dim()) throw ConfigError("pr_loss: dimension mismatch");
  const auto n = static_cast<std::size_t>(inst.n_samples());
  double total = 0.0;
  for (std::size_t idx : batch_idx) {
    if (idx >= n) {
      throw ConfigError("pr_loss: measurement index " + std::to_string(idx) +
                        " out of range [0, " + std::to_string(n) + ")");
    }
    total += pr_sample_loss(inst.sensing.row(static_cast<Eigen::Index>(idx)).transpose(),
                            inst.y[static_cast<Eigen::Index>(idx)], x);
  }
  return total / static_cast<double>(batch_idx.size());
}

/// Gradient of the n-th per-measurement loss: 4 (<a,x>^2 - y^2) <a,x> a.
inline Vector pr_loss_grad(const PhaseRetrievalInstance& inst, const Vector& x, std::size_t n) {
  if (n >= static_cast<std::size_t>(inst.n_samples())) {
    throw ConfigError("pr_loss_grad: measurement index out of range");
  }
  const auto row = inst.sensing.row(static_cast<Eigen::Index>(n));
  const double ax = row.dot(x);
  const double yn = inst.y[static_cast<Eigen::Index>(n)];
  return (4.0 * (ax * ax - yn * yn) * ax) * row.transpose();
}

/// Sign-invariant relative error min(||x - x0||, ||x + x0||) / ||x0||.
inline double pr_metric(const Vector& x, const Vector& x0) {
  const double scale = x0.norm();
  if (!(scale > 0.0)) throw DomainError("pr_metric: reference x0 has zero norm");
  if (x.size() != x0.size()) throw ConfigError("pr_metric: dimension mismatch");
  return std::min((x - x0).norm(), (x + x0).norm()) / scale;
}

struct PhaseRetrievalDraw {
  PhaseRetrievalInstance instance;
  Vector initial;
};

/// Draws x0 ~ N(0, 0.1 I_d), a_n ~ N(0, I_d), y_n = <a_n, x0>, a held-out set of
/// `validation_size` measurements, and an initial point ~ N(0, I_d / sqrt(d)), in
/// that order from `rng`.
inline PhaseRetrievalDraw pr_generate(int d, int n_samples, RngStream& rng,
                                      int validation_size = 128) {
  if (d < 1) throw ConfigError("pr_generate: d must be >= 1");
  if (n_samples < 1) throw ConfigError("pr_generate: n_samples must be >= 1");
  if (validation_size < 1) throw ConfigError("pr_generate: validation_size must be >= 1");
  PhaseRetrievalDraw out;
  auto& inst = out.instance;
  inst.x0 = rng.normal_vector(d, std::sqrt(0.1));
  auto draw_rows = [&](int rows) {
    Matrix m(rows, d);
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < d; ++c) m(i, c) = rng.normal();
    return m;
  };
  inst.sensing = draw_rows(n_samples);
  inst.y = inst.sensing * inst.x0;
  inst.validation_sensing = draw_rows(validation_size);
  inst.validation_y = inst.validation_sensing * inst.x0;
  out.initial = rng.normal_vector(d, std::pow(static_cast<double>(d), -0.25));
  return out;
}

/// StochasticProblem view of a phase-retrieval instance: f = -(per-measurement
/// loss); mini-batches are measurement indices drawn uniformly with replacement.
class PhaseRetrieval {
 public:
  using Batch = std::vector<std::size_t>;

  explicit PhaseRetrieval(PhaseRetrievalInstance inst) : inst_(std::move(inst)) {
    if (inst_.sensing.cols() != inst_.dim() || inst_.y.size() != inst_.n_samples()) {
      throw ConfigError("PhaseRetrieval: inconsistent instance shapes");
    }
  }

  const PhaseRetrievalInstance& instance() const { return inst_; }
  Eigen::Index dim() const { return inst_.dim(); }

  Batch sample_batch(RngStream& rng, std::size_t count) const {
    Batch b(count);
    const auto n = static_cast<std::uint64_t>(inst_.n_samples());
    for (auto& idx : b) idx = static_cast<std::size_t>(rng.uniform_index(n));
    return b;
  }

  double fitness(const Vector& w, const Batch& batch) const { return -pr_loss(inst_, w, batch); }

  double fitness_grad(const Vector& w, const Batch& batch, std::size_t j, Vector& grad) const {
    const auto n = static_cast<Eigen::Index>(batch[j]);
    const auto row = inst_.sensing.row(n);
    const double ax = row.dot(w);
    const double yn = inst_.y[n];
    const double r = ax * ax - yn * yn;
    grad = (-4.0 * r * ax) * row.transpose();
    return -r * r;
  }

  double validation_score(const Vector& w) const {
    const Vector ax = inst_.validation_sensing * w;
    const Vector r = ax.array().square() - inst_.validation_y.array().square();
    return -r.squaredNorm() / static_cast<double>(r.size());
  }

  std::optional<BoundsHint> bounds_hint() const { return std::nullopt; }

  double metric(const Vector& w) const { return pr_metric(w, inst_.x0); }

 private:
  PhaseRetrievalInstance inst_;
};

}  // namespace powerhp
