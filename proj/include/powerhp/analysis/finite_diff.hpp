#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "powerhp/core/vector.hpp"

namespace powerhp {

/// Central-difference gradient (f(w + h e_i) - f(w - h e_i)) / 2h per coordinate.
inline Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& w,
                               double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_grad: step h must be > 0");
  Vector g(w.size());
  Vector probe = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + h;
    const double up = f(probe);
    probe[i] = w[i] - h;
    const double down = f(probe);
    probe[i] = w[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw DomainError("finite_diff_grad: non-finite evaluation along coordinate " + std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||b||, floor).
inline double relative_error(const Vector& a, const Vector& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace powerhp
