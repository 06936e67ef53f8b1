#pragma once

#include <cmath>
#include <numeric>
#include <span>

#include "powerhp/core/errors.hpp"

namespace powerhp {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance (divisor n - 1).
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample variance needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
};

/// Welch's unequal-variance t statistic for mean(a) - mean(b), with the
/// Welch-Satterthwaite degrees of freedom.
inline WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("welch_t: each sample needs at least 2 values");
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw DomainError("welch_t: both samples have zero variance");
  WelchResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(se2);
  r.dof = se2 * se2 / (va * va / static_cast<double>(a.size() - 1) +
                       vb * vb / static_cast<double>(b.size() - 1));
  return r;
}

}  // namespace powerhp
