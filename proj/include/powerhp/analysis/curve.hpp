#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "powerhp/analysis/quadrature.hpp"

namespace powerhp {

/// One point of a 1-D surrogate curve:
///   g_value  = G(mu)   = E_e f(mu + e)
///   gn_value = G_N(mu) = E_e exp(N f(mu + e))
///   f_value  = F_{N,sigma}(mu) = E_{w ~ N(mu, sigma^2)} G_N(w)
/// with e ~ U[-h, h] the inner noise.
struct CurveSample {
  double mu = 0.0;
  double g_value = 0.0;
  double gn_value = 0.0;
  double f_value = 0.0;
};

struct CurveGrid {
  double lo = -1.0;
  double hi = 1.0;
  int steps = 4001;
};

struct CurveOptions {
  double inner_half_width = 0.1;  // 0 switches the inner noise off
  int inner_nodes = kDefaultLegendreNodes;
  bool normalize = false;
  // The Gaussian smoothing is a discrete convolution over a uniform lattice that
  // contains every grid point; its spacing is at most min(sigma/8, max_lattice_step)
  // and it extends tail_sigmas * sigma beyond the grid.
  double max_lattice_step = 1e-3;
  double tail_sigmas = 10.0;
};

/// Scales each of G, G_N, F by its maximum over the samples when that maximum is
/// positive (columns with a non-positive maximum are left as they are).
inline void normalize_curve(std::vector<CurveSample>& samples) {
  auto scale = [&](double CurveSample::*field) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) peak = std::max(peak, s.*field);
    if (!(peak > 0.0)) return;
    for (auto& s : samples) s.*field /= peak;
  };
  scale(&CurveSample::g_value);
  scale(&CurveSample::gn_value);
  scale(&CurveSample::f_value);
}

/// G, G_N and F_{N,sigma} of a scalar fitness f on a uniform grid.
///
/// The inner uniform expectation uses Gauss-Legendre per point. F is computed
/// by trapezoidal convolution of G_N against the N(0, sigma^2) density on a
/// lattice aligned with the grid; for integrands smooth on the lattice scale
/// this converges exponentially in sigma / spacing.
inline std::vector<CurveSample> surrogate_curve_1d(const std::function<double(double)>& f,
                                                   double power, double sigma, CurveGrid grid,
                                                   CurveOptions opts = {}) {
  if (!(sigma > 0.0)) throw ConfigError("surrogate_curve_1d: sigma must be > 0");
  if (grid.steps < 2) throw ConfigError("surrogate_curve_1d: grid needs at least 2 steps");
  if (!(grid.hi > grid.lo)) throw ConfigError("surrogate_curve_1d: grid needs hi > lo");
  if (!(power > 0.0)) throw ConfigError("surrogate_curve_1d: N must be > 0");
  if (!(opts.inner_half_width >= 0.0)) throw ConfigError("surrogate_curve_1d: inner half width must be >= 0");

  auto checked_f = [&](double mu) {
    const double v = f(mu);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "surrogate_curve_1d: f is not finite at mu = " << mu;
      throw DomainError(os.str());
    }
    return v;
  };
  auto exp_power_f = [&](double mu) { return std::exp(power * checked_f(mu)); };

  const double grid_step = (grid.hi - grid.lo) / (grid.steps - 1);
  const double target = std::min(sigma / 8.0, opts.max_lattice_step);
  const auto refine = static_cast<long>(std::max(1.0, std::ceil(grid_step / target)));
  const double h = grid_step / static_cast<double>(refine);
  const auto tail = static_cast<long>(std::ceil(opts.tail_sigmas * sigma / h));
  const long lattice_last = static_cast<long>(grid.steps - 1) * refine;

  // G_N on lattice points j = -tail .. lattice_last + tail.
  std::vector<double> gn_lattice(static_cast<std::size_t>(lattice_last + 2 * tail + 1));
  for (long j = -tail; j <= lattice_last + tail; ++j) {
    const double w = grid.lo + static_cast<double>(j) * h;
    gn_lattice[static_cast<std::size_t>(j + tail)] =
        uniform_expectation(exp_power_f, w, opts.inner_half_width, opts.inner_nodes);
  }
  std::vector<double> kernel(static_cast<std::size_t>(2 * tail + 1));
  const double norm = h / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (long k = -tail; k <= tail; ++k) {
    const double z = static_cast<double>(k) * h / sigma;
    kernel[static_cast<std::size_t>(k + tail)] = norm * std::exp(-0.5 * z * z);
  }

  std::vector<CurveSample> out(static_cast<std::size_t>(grid.steps));
  for (int i = 0; i < grid.steps; ++i) {
    CurveSample& s = out[static_cast<std::size_t>(i)];
    const long center = static_cast<long>(i) * refine;  // lattice index of mu_i
    s.mu = grid.lo + static_cast<double>(center) * h;
    s.g_value = uniform_expectation(checked_f, s.mu, opts.inner_half_width, opts.inner_nodes);
    s.gn_value = gn_lattice[static_cast<std::size_t>(center + tail)];
    double acc = 0.0;
    for (long k = -tail; k <= tail; ++k) {
      acc += kernel[static_cast<std::size_t>(k + tail)] *
             gn_lattice[static_cast<std::size_t>(center + k + tail)];
    }
    s.f_value = acc;
  }
  if (opts.normalize) normalize_curve(out);
  return out;
}

// Location of the largest F_{N,sigma} value (first one on ties).
inline double curve_argmax_f(const std::vector<CurveSample>& samples) {
  if (samples.empty()) throw ConfigError("curve_argmax_f: empty curve");
  auto best = samples.begin();
  for (auto it = samples.begin(); it != samples.end(); ++it) {
    if (it->f_value > best->f_value) best = it;
  }
  return best->mu;
}

}  // namespace powerhp
