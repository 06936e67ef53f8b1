#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "powerhp/core/errors.hpp"

namespace powerhp {

// Points in parameter space (w, mu, w*). Dimension is fixed per problem instance.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw AbortError(what + " has non-finite entries");
}

inline void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw AbortError(what + " is not finite");
}

}  // namespace powerhp
