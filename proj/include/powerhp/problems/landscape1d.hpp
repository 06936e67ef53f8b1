#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "powerhp/problems/problem.hpp"

namespace powerhp {

// Two-peak illustrative landscape: a sharp global peak at -0.5 and a wider local
// peak at +0.5, zero outside [-1, 1].
inline double landscape1d_f(double mu) {
  if (std::abs(mu) > 1.0) return 0.0;
  const double a = (mu + 0.5) * (mu + 0.5) + 1e-5;
  const double c = (mu - 0.5) * (mu - 0.5) + 1e-2;
  return -std::log(a) - std::log(c) + 10.0;
}

inline double landscape1d_df(double mu) {
  if (std::abs(mu) > 1.0) return 0.0;
  const double a = (mu + 0.5) * (mu + 0.5) + 1e-5;
  const double c = (mu - 0.5) * (mu - 0.5) + 1e-2;
  return -2.0 * (mu + 0.5) / a - 2.0 * (mu - 0.5) / c;
}

/// Landscape1D as a stochastic problem: x ~ U[-h, h] (h = 0.1 by default) and
/// f_w(x) = landscape1d_f(w + x), so G(mu) is the uniformly blurred landscape.
/// The metric is the distance to the global peak location -0.5.
class Landscape1D {
 public:
  using Batch = std::vector<double>;

  static constexpr double kPeak = -0.5;

  Landscape1D(RngStream validation_rng, int validation_size = 256, double half_width = 0.1)
      : half_width_(half_width) {
    if (validation_size < 1) throw ConfigError("Landscape1D: validation_size must be >= 1");
    validation_.resize(static_cast<std::size_t>(validation_size));
    for (auto& e : validation_) e = validation_rng.uniform(-half_width_, half_width_);
  }

  Eigen::Index dim() const { return 1; }
  double half_width() const { return half_width_; }

  Batch sample_batch(RngStream& rng, std::size_t count) const {
    Batch b(count);
    for (auto& e : b) e = rng.uniform(-half_width_, half_width_);
    return b;
  }

  double fitness(const Vector& w, const Batch& batch) const {
    double total = 0.0;
    for (double e : batch) total += landscape1d_f(w[0] + e);
    return total / static_cast<double>(batch.size());
  }

  double fitness_grad(const Vector& w, const Batch& batch, std::size_t j, Vector& grad) const {
    const double u = w[0] + batch[j];
    grad.resize(1);
    grad[0] = landscape1d_df(u);
    return landscape1d_f(u);
  }

  double validation_score(const Vector& w) const { return fitness(w, validation_); }

  // The landscape is discontinuous at |mu| = 1, so no Lipschitz certificate.
  std::optional<BoundsHint> bounds_hint() const { return std::nullopt; }

  double metric(const Vector& w) const { return std::abs(w[0] - kPeak); }

 private:
  double half_width_;
  Batch validation_;
};

}  // namespace powerhp
