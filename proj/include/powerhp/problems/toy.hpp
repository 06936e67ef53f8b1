#pragma once

#include <cmath>
#include <optional>

#include "powerhp/problems/problem.hpp"

// Small analytic problems used as oracles: each has a closed-form surrogate,
// gradient or bound against which the estimators are checked.

namespace powerhp {

/// f_w = c (no data dependence).
class ConstantToy {
 public:
  using Batch = CountBatch;
  ConstantToy(Eigen::Index dim, double value) : dim_(dim), value_(value) {}
  Eigen::Index dim() const { return dim_; }
  Batch sample_batch(RngStream&, std::size_t count) const { return {count}; }
  double fitness(const Vector&, const Batch&) const { return value_; }
  double fitness_grad(const Vector&, const Batch&, std::size_t, Vector& grad) const {
    grad.setZero(dim_);
    return value_;
  }
  double validation_score(const Vector&) const { return value_; }
  std::optional<BoundsHint> bounds_hint() const { return BoundsHint{value_, 0.0}; }

 private:
  Eigen::Index dim_;
  double value_;
};

/// f_w = a'w + offset (no data dependence).
class LinearToy {
 public:
  using Batch = CountBatch;
  explicit LinearToy(Vector slope, double offset = 0.0) : slope_(std::move(slope)), offset_(offset) {}
  Eigen::Index dim() const { return slope_.size(); }
  const Vector& slope() const { return slope_; }
  Batch sample_batch(RngStream&, std::size_t count) const { return {count}; }
  double fitness(const Vector& w, const Batch&) const { return slope_.dot(w) + offset_; }
  double fitness_grad(const Vector& w, const Batch&, std::size_t, Vector& grad) const {
    grad = slope_;
    return slope_.dot(w) + offset_;
  }
  double validation_score(const Vector& w) const { return slope_.dot(w) + offset_; }
  std::optional<BoundsHint> bounds_hint() const { return std::nullopt; }

 private:
  Vector slope_;
  double offset_;
};

/// f_w = -||w - c||^2 / 2 (no data dependence). For w ~ N(mu, sigma^2 I) in one
/// dimension the surrogate has the closed form below.
class QuadraticToy {
 public:
  using Batch = CountBatch;
  explicit QuadraticToy(Vector center) : center_(std::move(center)) {}
  Eigen::Index dim() const { return center_.size(); }
  const Vector& center() const { return center_; }
  Batch sample_batch(RngStream&, std::size_t count) const { return {count}; }
  double fitness(const Vector& w, const Batch&) const { return -0.5 * (w - center_).squaredNorm(); }
  double fitness_grad(const Vector& w, const Batch&, std::size_t, Vector& grad) const {
    grad = center_ - w;
    return -0.5 * (w - center_).squaredNorm();
  }
  double validation_score(const Vector& w) const { return -0.5 * (w - center_).squaredNorm(); }
  std::optional<BoundsHint> bounds_hint() const { return std::nullopt; }
  double metric(const Vector& w) const { return (w - center_).norm(); }

 private:
  Vector center_;
};

// F_{N,sigma}(mu) = (1 + N sigma^2)^{-1/2} exp(-N (mu - c)^2 / (2 (1 + N sigma^2)))
// for f_w = -(w - c)^2 / 2.
inline double quadratic_surrogate(double power, double sigma, double mu, double c) {
  const double s = 1.0 + power * sigma * sigma;
  return std::exp(-power * (mu - c) * (mu - c) / (2.0 * s)) / std::sqrt(s);
}

// d/dmu of quadratic_surrogate.
inline double quadratic_surrogate_grad(double power, double sigma, double mu, double c) {
  const double s = 1.0 + power * sigma * sigma;
  return -power * (mu - c) / s * quadratic_surrogate(power, sigma, mu, c);
}

/// f_w(x) = 1 - sqrt(1 + ||w - x||^2) with x ~ N(0, I): f <= 0 and
/// ||grad_w f|| < 1, certified by BoundsHint{0, 1}.
class BoundedLipschitzToy {
 public:
  struct Batch {
    Matrix x;
    std::size_t size() const { return static_cast<std::size_t>(x.cols()); }
  };
  explicit BoundedLipschitzToy(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dim() const { return dim_; }
  Batch sample_batch(RngStream& rng, std::size_t count) const {
    Batch b{Matrix(dim_, static_cast<Eigen::Index>(count))};
    for (Eigen::Index c = 0; c < b.x.cols(); ++c)
      for (Eigen::Index i = 0; i < dim_; ++i) b.x(i, c) = rng.normal();
    return b;
  }
  double fitness(const Vector& w, const Batch& batch) const {
    double total = 0.0;
    for (Eigen::Index c = 0; c < batch.x.cols(); ++c) {
      total += 1.0 - std::sqrt(1.0 + (w - batch.x.col(c)).squaredNorm());
    }
    return total / static_cast<double>(batch.x.cols());
  }
  double fitness_grad(const Vector& w, const Batch& batch, std::size_t j, Vector& grad) const {
    const Vector diff = w - batch.x.col(static_cast<Eigen::Index>(j));
    const double root = std::sqrt(1.0 + diff.squaredNorm());
    grad = -diff / root;
    return 1.0 - root;
  }
  double validation_score(const Vector& w) const { return 1.0 - std::sqrt(1.0 + w.squaredNorm()); }
  std::optional<BoundsHint> bounds_hint() const { return BoundsHint{0.0, 1.0}; }

 private:
  Eigen::Index dim_;
};

}  // namespace powerhp
