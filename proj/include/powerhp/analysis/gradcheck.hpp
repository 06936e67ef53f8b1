#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "powerhp/analysis/finite_diff.hpp"
#include "powerhp/problems/landscape1d.hpp"
#include "powerhp/problems/phase_retrieval.hpp"
#include "powerhp/problems/toy.hpp"
#include "powerhp/problems/two_layer.hpp"

namespace powerhp {

struct GradCheckResult {
  std::string name;
  int points = 0;
  double max_rel_error = 0.0;
  double tolerance = 1e-4;
  bool passed() const { return max_rel_error <= tolerance; }
};

inline const std::vector<std::string>& gradcheck_suites() {
  static const std::vector<std::string> names = {"phase_retrieval", "two_layer", "landscape1d", "quadratic",
                                                 "bounded_lipschitz"};
  return names;
}

namespace detail {

inline double fd_step(const Vector& w) { return 1e-5 * (1.0 + w.norm()); }

// Relative error with a floor tied to the finite-difference truncation scale.
inline double grad_rel_error(const Vector& analytic, const Vector& numeric) {
  return (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), 1e-6});
}

}  // namespace detail

/// Compares an analytic gradient with central differences at `points` random
/// points drawn from `rng`. Two-layer points are redrawn while any unit sits
/// within the step of its ReLU kink.
inline GradCheckResult gradcheck_suite(const std::string& name, RngStream rng, int points = 100) {
  if (points < 1) throw ConfigError("gradcheck: points must be >= 1");
  GradCheckResult res;
  res.name = name;
  res.points = points;
  auto record = [&](const Vector& a, const Vector& b) {
    res.max_rel_error = std::max(res.max_rel_error, detail::grad_rel_error(a, b));
  };
  if (name == "phase_retrieval") {
    const auto draw = pr_generate(10, 30, rng, 4);
    const auto& inst = draw.instance;
    for (int p = 0; p < points; ++p) {
      const Vector x = rng.normal_vector(10, 0.5);
      const auto n = static_cast<std::size_t>(rng.uniform_index(30));
      const auto row = inst.sensing.row(static_cast<Eigen::Index>(n)).transpose();
      const double y = inst.y[static_cast<Eigen::Index>(n)];
      const Vector numeric =
          finite_diff_grad([&](const Vector& v) { return pr_sample_loss(row, y, v); }, x, detail::fd_step(x));
      record(pr_loss_grad(inst, x, n), numeric);
    }
  } else if (name == "two_layer") {
    const int k = 6, n = 5;
    const auto draw = tl_generate(k, n, rng, 4, 5000);
    const auto& inst = draw.instance;
    for (int p = 0; p < points; ++p) {
      Vector w, x;
      for (;;) {
        w = rng.normal_vector(static_cast<Eigen::Index>(n) * k, 1.0 / std::sqrt(static_cast<double>(k)));
        x = rng.normal_vector(k, 1.0);
        const double h = detail::fd_step(w);
        const Vector pre = student_weights(w, n, k) * x;
        if ((pre.array().abs() > 10.0 * h * x.norm()).all()) break;
      }
      Matrix row(1, k);
      row.row(0) = x.transpose();
      const Vector numeric =
          finite_diff_grad([&](const Vector& v) { return tl_loss(inst, v, row); }, w, detail::fd_step(w));
      record(tl_loss_grad(inst, w, x), numeric);
    }
  } else if (name == "landscape1d") {
    for (int p = 0; p < points; ++p) {
      Vector w(1);
      w[0] = rng.uniform(-0.98, 0.98);
      const Vector numeric =
          finite_diff_grad([](const Vector& v) { return landscape1d_f(v[0]); }, w, detail::fd_step(w));
      Vector analytic(1);
      analytic[0] = landscape1d_df(w[0]);
      record(analytic, numeric);
    }
  } else if (name == "quadratic") {
    const Vector c = rng.normal_vector(4, 1.0);
    const QuadraticToy toy(c);
    const QuadraticToy::Batch batch{};
    for (int p = 0; p < points; ++p) {
      const Vector w = rng.normal_vector(4, 2.0);
      Vector analytic(4);
      toy.fitness_grad(w, batch, 0, analytic);
      const Vector numeric =
          finite_diff_grad([&](const Vector& v) { return toy.fitness(v, batch); }, w, detail::fd_step(w));
      record(analytic, numeric);
    }
  } else if (name == "bounded_lipschitz") {
    const BoundedLipschitzToy toy(5);
    for (int p = 0; p < points; ++p) {
      const auto batch = toy.sample_batch(rng, 1);
      const Vector w = rng.normal_vector(5, 1.5);
      Vector analytic(5);
      toy.fitness_grad(w, batch, 0, analytic);
      const Vector numeric =
          finite_diff_grad([&](const Vector& v) { return toy.fitness(v, batch); }, w, detail::fd_step(w));
      record(analytic, numeric);
    }
  } else {
    throw ConfigError("gradcheck: unknown suite '" + name + "'");
  }
  return res;
}

}  // namespace powerhp
