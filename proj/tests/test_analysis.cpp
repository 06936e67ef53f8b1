#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "powerhp/analysis/curve.hpp"
#include "powerhp/analysis/finite_diff.hpp"
#include "powerhp/analysis/gradcheck.hpp"
#include "powerhp/analysis/quadrature.hpp"
#include "powerhp/analysis/stats.hpp"
#include "powerhp/problems/landscape1d.hpp"
#include "powerhp/problems/toy.hpp"

using namespace powerhp;

// ---- quadrature --------------------------------------------------------------

TEST(Quadrature, RulesIntegratePolynomialsExactly) {
  const auto& gl = gauss_legendre(8);
  EXPECT_NEAR(gl.weights.sum(), 2.0, 1e-13);
  // int_{-1}^{1} x^14 = 2/15.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < 8; ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], 14);
  EXPECT_NEAR(acc, 2.0 / 15.0, 1e-13);

  const auto& gh = gauss_hermite(20);
  EXPECT_NEAR(gh.weights.sum(), std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_THROW(make_gauss_hermite(0), ConfigError);
}

TEST(Quadrature, GaussianMoments) {
  EXPECT_NEAR(gaussian_expectation([](double x) { return x; }, 1.5, 2.0), 1.5, 1e-12);
  EXPECT_NEAR(gaussian_expectation([](double x) { return x * x; }, 1.5, 2.0), 1.5 * 1.5 + 4.0, 1e-11);
  EXPECT_NEAR(uniform_expectation([](double x) { return x * x; }, 0.0, 0.3), 0.03, 1e-14);
  EXPECT_EQ(uniform_expectation([](double x) { return 3 * x; }, 2.0, 0.0), 6.0);
}

TEST(Surrogate, QuadraticClosedForm) {
  const double c = 0.25;
  for (double n : {0.5, 1.0, 4.0, 10.0}) {
    for (double sigma : {0.1, 0.5, 1.0, 2.0}) {
      for (double mu : {-1.0, 0.0, 0.7}) {
        const double q = gaussian_expectation(
            [&](double w) { return std::exp(-n * 0.5 * (w - c) * (w - c)); }, mu, sigma);
        EXPECT_NEAR(q, quadratic_surrogate(n, sigma, mu, c), 1e-8) << n << " " << sigma << " " << mu;
      }
    }
  }
}

TEST(Surrogate, ZeroFitnessGivesOne) {
  for (double n : {0.1, 1.0, 5.0})
    EXPECT_NEAR(gaussian_expectation([&](double) { return std::exp(n * 0.0); }, 0.3, 0.9), 1.0, 1e-12);
  const auto curve = surrogate_curve_1d([](double) { return 0.0; }, 2.0, 0.5, {-1, 1, 21});
  for (const auto& s : curve) {
    EXPECT_EQ(s.g_value, 0.0);
    EXPECT_NEAR(s.gn_value, 1.0, 1e-12);
    EXPECT_NEAR(s.f_value, 1.0, 1e-10);
  }
}

TEST(Surrogate, MonteCarloAgreesWithQuadrature) {
  const std::vector<std::function<double(double)>> fs = {
      [](double w) { return -w * w; },
      [](double w) { return std::sin(3 * w) - 1.0; },
      [](double w) { return -std::log1p(w * w); },
      [](double w) { return -std::abs(std::tanh(w)) - 0.5 * std::cos(w) * std::cos(w); },
      [](double w) { return -1.0 / (1.0 + std::exp(-2 * w)); },
  };
  RngStream rng(1, 1);
  const int draws = 1000000;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double n = rng.uniform(0.5, 4.0), sigma = rng.uniform(0.2, 1.5), mu = rng.uniform(-1.0, 1.0);
    auto integrand = [&](double w) { return std::exp(n * fs[i](w)); };
    const double q = gaussian_expectation(integrand, mu, sigma);
    double s1 = 0, s2 = 0;
    for (int k = 0; k < draws; ++k) {
      const double v = integrand(rng.normal(mu, sigma));
      s1 += v;
      s2 += v * v;
    }
    const double m = s1 / draws;
    const double se = std::sqrt((s2 / draws - m * m) / draws);
    EXPECT_NEAR(m, q, 4 * se) << "f" << i;
  }
}

TEST(Curve, LatticeConvolutionMatchesQuadraticClosedForm) {
  const double c = 0.1, n = 2.0, sigma = 0.3;
  CurveOptions opts;
  opts.inner_half_width = 0.0;
  const auto curve =
      surrogate_curve_1d([&](double w) { return -0.5 * (w - c) * (w - c); }, n, sigma, {-1, 1, 41}, opts);
  for (const auto& s : curve) EXPECT_NEAR(s.f_value, quadratic_surrogate(n, sigma, s.mu, c), 1e-10) << s.mu;
}

TEST(Curve, NormalizationIdempotent) {
  auto curve = surrogate_curve_1d(landscape1d_f, 0.5, 0.8, {-1, 1, 201});
  normalize_curve(curve);
  const auto once = curve;
  normalize_curve(curve);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].f_value, once[i].f_value);
    EXPECT_EQ(curve[i].gn_value, once[i].gn_value);
  }
  double peak = 0.0;
  for (const auto& s : curve) peak = std::max(peak, s.f_value);
  EXPECT_NEAR(peak, 1.0, 1e-12);
}

TEST(Curve, NormalizeLeavesNonPositiveColumns) {
  std::vector<CurveSample> s = {{0, -1, 2, 4}, {1, -2, 1, 2}};
  normalize_curve(s);
  EXPECT_EQ(s[0].g_value, -1);
  EXPECT_EQ(s[1].gn_value, 0.5);
  EXPECT_EQ(s[0].f_value, 1.0);
}

TEST(Curve, PeakMovesTowardSharpPeakAsPowerGrows) {
  std::vector<double> distance;
  for (double n : {0.5, 1.0, 2.0, 4.0}) {
    const auto curve = surrogate_curve_1d(landscape1d_f, n, 0.8, {-1, 1, 4001});
    distance.push_back(std::abs(curve_argmax_f(curve) - Landscape1D::kPeak));
  }
  for (std::size_t i = 1; i < distance.size(); ++i) EXPECT_LE(distance[i], distance[i - 1]) << i;
  EXPECT_LT(distance.back(), distance.front());
  EXPECT_NEAR(distance[0], 0.2225, 5e-3);
  EXPECT_LE(distance[3], 1e-3);
}

TEST(Curve, RejectsBadArguments) {
  EXPECT_THROW(surrogate_curve_1d(landscape1d_f, 1.0, 0.0, {}), ConfigError);
  EXPECT_THROW(surrogate_curve_1d(landscape1d_f, 0.0, 1.0, {}), ConfigError);
  EXPECT_THROW(surrogate_curve_1d(landscape1d_f, 1.0, 1.0, {1, -1, 10}), ConfigError);
  EXPECT_THROW(surrogate_curve_1d([](double) { return NAN; }, 1.0, 1.0, {-1, 1, 3}), DomainError);
  EXPECT_THROW(curve_argmax_f({}), ConfigError);
}

// ---- finite differences ---------------------------------------------------------

TEST(FiniteDiff, Examples) {
  Vector w(2);
  w << 1.0, 2.0;
  const Vector g = finite_diff_grad([](const Vector& v) { return v[0] * v[0] + 3 * v[1]; }, w, 1e-5);
  EXPECT_NEAR(g[0], 2.0, 1e-9);
  EXPECT_NEAR(g[1], 3.0, 1e-9);
  Vector x(1);
  x[0] = 0.5;
  EXPECT_NEAR(finite_diff_grad([](const Vector& v) { return std::sin(v[0]); }, x, 1e-5)[0], std::cos(0.5), 1e-9);
  EXPECT_THROW(finite_diff_grad([](const Vector&) { return 0.0; }, x, 0.0), ConfigError);
  EXPECT_THROW(finite_diff_grad([](const Vector& v) { return std::log(v[0] - 0.5); }, x, 1e-5), DomainError);
}

TEST(GradCheck, AllSuitesPass) {
  std::uint64_t i = 1;
  for (const auto& name : gradcheck_suites()) {
    const auto res = gradcheck_suite(name, RngStream(1, i++), 100);
    EXPECT_TRUE(res.passed()) << name << " " << res.max_rel_error;
    EXPECT_EQ(res.points, 100);
  }
  EXPECT_THROW(gradcheck_suite("nope", RngStream(1, 1)), ConfigError);
}

// ---- statistics --------------------------------------------------------------

TEST(Welch, HandExample) {
  const std::vector<double> a = {1, 2, 3}, b = {2, 3, 4};
  const auto r = welch_t(a, b);
  EXPECT_NEAR(r.t, -1.224744871391589, 1e-12);
  EXPECT_NEAR(r.dof, 4.0, 1e-12);
}

TEST(Welch, AntisymmetricAndZeroOnIdentical) {
  const std::vector<double> a = {0.1, 0.4, 0.35, 0.2}, b = {0.5, 0.45, 0.9, 0.7, 0.61};
  const auto ab = welch_t(a, b), ba = welch_t(b, a);
  EXPECT_EQ(ab.t, -ba.t);
  EXPECT_EQ(ab.dof, ba.dof);
  EXPECT_EQ(welch_t(a, a).t, 0.0);
}

TEST(Welch, DegenerateSamples) {
  const std::vector<double> c = {1, 1, 1}, d = {2, 2, 2}, one = {1};
  EXPECT_THROW(welch_t(c, d), DomainError);
  EXPECT_THROW(welch_t(one, d), DomainError);
  EXPECT_THROW(mean(std::vector<double>{}), DomainError);
  EXPECT_DOUBLE_EQ(sample_variance(std::vector<double>{1, 2, 3, 4}), 5.0 / 3.0);
}
