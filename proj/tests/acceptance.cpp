// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. With arguments, only the listed criterion numbers run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "powerhp/analysis/curve.hpp"
#include "powerhp/analysis/gradcheck.hpp"
#include "powerhp/harness/persist.hpp"

#ifndef POWERHP_CONFIG_DIR
#define POWERHP_CONFIG_DIR "configs"
#endif

using namespace powerhp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector scalar(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

ProtocolSpec config(const std::string& name) { return load_protocol(std::string(POWERHP_CONFIG_DIR) + "/" + name); }

// 1. Quadrature surrogate of the 1-D quadratic against its closed form.
Outcome closed_form() {
  RngStream rng(101, 1);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double n = rng.uniform(0.05, 10.0), sigma = rng.uniform(0.05, 2.0);
    const double mu = rng.uniform(-2.0, 2.0), c = rng.uniform(-2.0, 2.0);
    const double q =
        gaussian_expectation([&](double w) { return std::exp(-0.5 * n * (w - c) * (w - c)); }, mu, sigma);
    const double exact = quadratic_surrogate(n, sigma, mu, c);
    worst = std::max(worst, std::abs(q - exact) / exact);
  }
  return {worst <= 1e-8, fmt("max relative error %.3g over 50 tuples (limit 1e-8)", worst)};
}

// 2. Estimator mean within 4 standard errors of the analytic gradient.
Outcome unbiased() {
  struct Case {
    double n, sigma, mu, c;
  };
  const std::vector<Case> cases = {
      {1.0, 0.5, -0.3, 0.4}, {3.0, 0.8, 0.0, 0.4}, {0.5, 1.5, 1.2, -0.2}, {8.0, 0.2, 0.6, 0.5}, {2.0, 2.0, -1.0, 1.0}};
  RngStream noise(102, 1), data(102, 2);
  const int draws = 200000;
  double worst = 0.0;
  for (const auto& k : cases) {
    const QuadraticToy toy(scalar(k.c));
    std::vector<double> xs(draws);
    for (auto& x : xs) x = powerhp_grad_estimate(toy, scalar(k.mu), {k.n, k.sigma}, 1, 1, noise, data)[0];
    const double se = std::sqrt(sample_variance(xs) / draws);
    worst = std::max(worst, std::abs(mean(xs) - quadratic_surrogate_grad(k.n, k.sigma, k.mu, k.c)) / se);
  }
  return {worst <= 4.0, fmt("largest deviation %.2f standard errors over 5 configurations (limit 4)", worst)};
}

// 3. Certified estimate-norm bound on the bounded-Lipschitz toy.
Outcome norm_bound() {
  const BoundedLipschitzToy toy(5);
  RngStream noise(103, 1), data(103, 2), pts(103, 3);
  int violations = 0;
  const int total = 10000;
  for (int i = 0; i < total; ++i) {
    const double n = pts.uniform(0.05, 5.0);
    const Vector mu = pts.normal_vector(5, 2.0);
    const Vector g = powerhp_grad_estimate(toy, mu, {n, pts.uniform(0.01, 2.0)}, 2, 4, noise, data);
    if (g.squaredNorm() > estimate_sq_norm_bound(n, *toy.bounds_hint())) ++violations;
  }
  return {violations == 0, fmt("%d violations in %d estimates", violations, total)};
}

// 4. Surrogate peak moves toward the sharp peak as N grows.
Outcome alignment() {
  std::vector<double> dist;
  std::string detail = "distance to -0.5:";
  for (double n : {0.5, 1.0, 2.0, 4.0}) {
    const auto curve = surrogate_curve_1d(landscape1d_f, n, 0.8, {-1.0, 1.0, 4001});
    dist.push_back(std::abs(curve_argmax_f(curve) - Landscape1D::kPeak));
    detail += fmt(" N=%g:%.4g", n, dist.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < dist.size(); ++i) ok = ok && dist[i] <= dist[i - 1];
  return {ok, detail};
}

std::string aggregate_line(const ProtocolReport& r) {
  std::string s;
  for (const auto& a : r.aggregates) {
    s += fmt("%s SR=%.2f mean=%.4g", a.method.c_str(), a.success_rate, a.mean_metric);
    if (a.t_vs_reference) s += fmt(" t=%.2f", *a.t_vs_reference);
    s += "; ";
  }
  return s;
}

// 5. Phase retrieval, d = 100.
Outcome phase_retrieval() {
  const auto spec = config("pr_d100.json");
  const auto r = run_protocol(spec);
  const auto& ours = r.aggregate(spec.reference);
  bool ok = ours.success_rate >= 0.70;
  for (const auto& a : r.aggregates) {
    if (a.method == spec.reference) continue;
    ok = ok && ours.success_rate - a.success_rate >= 0.20 - 1e-12;
    ok = ok && a.t_vs_reference && *a.t_vs_reference < 0.0;
  }
  return {ok && r.pairing_ok(), aggregate_line(r)};
}

// 6. Two-layer (k, n) = (20, 19).
Outcome two_layer() {
  const auto spec = config("two_layer_k20_n19.json");
  const auto r = run_protocol(spec);
  const auto& ours = r.aggregate(spec.reference);
  bool ok = true;
  for (const auto& a : r.aggregates) {
    if (a.method == spec.reference) continue;
    ok = ok && ours.mean_metric < a.mean_metric;
    ok = ok && a.t_vs_reference && *a.t_vs_reference <= -1.0;
  }
  return {ok && r.pairing_ok(), aggregate_line(r)};
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// 7. Two-layer (20, 20): completion, success rule and CSV schema.
Outcome exact_parameterization() {
  const auto spec = config("two_layer_k20_n20.json");
  const auto r = run_protocol(spec);
  const auto n_rows = static_cast<std::size_t>(spec.n_trials) * spec.methods.size();
  bool ok = r.trials.size() == n_rows && r.aggregates.size() == spec.methods.size();
  ok = ok && spec.success_threshold == 1e-3;
  for (const auto& t : r.trials) ok = ok && t.success == (!t.aborted && t.best_metric <= 1e-3);

  const fs::path dir = fs::temp_directory_path() / "powerhp_acceptance_7";
  fs::remove_all(dir);
  persist(r, dir);
  const auto trials = lines_of(dir / "trials.csv");
  const auto agg = lines_of(dir / "aggregate.csv");
  ok = ok && trials.size() == n_rows + 1 && trials[0] == "trial_id,method,best_metric,success,time_to_best,aborted";
  ok = ok && agg.size() == spec.methods.size() + 1 &&
       agg[0] == "method,mean_metric,success_rate,mean_time_to_best,t_vs_reference,dof";
  for (std::size_t i = 1; i < trials.size(); ++i) {
    ok = ok && std::count(trials[i].begin(), trials[i].end(), ',') == 5;
  }
  ok = ok && fs::exists(dir / "spec.json");
  fs::remove_all(dir);
  return {ok, aggregate_line(r)};
}

// 8. Property suite.
Outcome properties() {
  std::vector<std::string> failed;
  auto check = [&](bool cond, const char* name) {
    if (!cond) failed.push_back(name);
  };

  ScheduleConfig sc{0.3, 2.0, 1.0, 0.01, 0.99, 0.1, 0.995, 2.0};
  bool sched_ok = true;
  double partial = 0.0;
  const double bound = sc.alpha_scale * sc.alpha_scale * (1.0 + 1.0 / (2.0 * sc.gamma));
  // Strict comparisons only while the per-step change is above double resolution.
  for (std::int64_t t = 1; t <= 20000; ++t) {
    sched_ok = sched_ok && power_at(sc, t) <= power_at(sc, t + 1) && power_at(sc, t + 1) <= sc.n0 + sc.delta;
    if (t < 2000) {
      sched_ok = sched_ok && power_at(sc, t) < power_at(sc, t + 1);
      sched_ok = sched_ok && smoothing_at(sc, t) > smoothing_at(sc, t + 1) && smoothing_at(sc, t + 1) > sc.b;
    }
    partial += std::pow(learning_rate_at(sc, t), 2);
    sched_ok = sched_ok && partial <= bound;
  }
  check(sched_ok, "schedules");

  RngStream a(1, 1), a2(1, 1), b(1, 2);
  bool rng_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    rng_ok = rng_ok && x == a2.next_u64() && x != b.next_u64();
  }
  check(rng_ok, "rng streams");

  RngStream rng(108, 1);
  const auto draw = pr_generate(20, 60, rng, 16);
  bool sym = true;
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.normal_vector(20, 1.0);
    sym = sym && pr_metric(x, draw.instance.x0) == pr_metric(-x, draw.instance.x0);
    const std::vector<std::size_t> idx = {static_cast<std::size_t>(i % 60)};
    sym = sym && pr_loss(draw.instance, x, idx) == pr_loss(draw.instance, -x, idx);
  }
  check(sym, "pr symmetries");

  std::uint64_t suite_id = 1;
  for (const auto& name : gradcheck_suites()) check(gradcheck_suite(name, RngStream(108, ++suite_id), 100).passed(), "gradcheck");

  const BoundedLipschitzToy toy(4);
  auto streams = [] { return StepStreams{RngStream(108, 11), RngStream(108, 12)}; };
  const auto sgd = run(MethodSpec{"sgd", MethodKind::kSgd, SgdConfig{0.05, 3}}, toy, Vector::Ones(4), 300, streams());
  const auto sam = run(MethodSpec{"sam", MethodKind::kSam, SamConfig{0.05, 0.0, 3}}, toy, Vector::Ones(4), 300, streams());
  SlghConfig slgh;
  slgh.lr = 0.05;
  slgh.sigma0 = 0.0;
  slgh.j_batch = 3;
  const auto slghr = run(MethodSpec{"slghr", MethodKind::kSlghR, slgh}, toy, Vector::Ones(4), 300, streams());
  check(sam.final_point == sgd.final_point && sam.trajectory.records.size() == sgd.trajectory.records.size(), "sam(rho=0) == sgd");
  check(slghr.final_point == sgd.final_point, "slghr(sigma0=0) == sgd");

  const std::vector<double> xs = {0.1, 0.4, 0.35, 0.2}, ys = {0.5, 0.45, 0.9, 0.7, 0.61};
  check(welch_t(xs, ys).t == -welch_t(ys, xs).t && welch_t(xs, xs).t == 0.0, "welch antisymmetry");

  // Determinism and replay: a protocol and its re-parsed spec.json give bit-identical rows.
  const auto spec = protocol_from_json(json{{"problem", {{"kind", "landscape1d"}}},
                                            {"n_trials", 4},
                                            {"T", 300},
                                            {"methods", {"powerhp", "adam", "sgd", "sam", "slghr", "slghd"}}});
  const auto r1 = run_protocol(spec, 1);
  const auto r2 = run_protocol(protocol_from_json(to_json(spec)), 3);
  bool same = r1.trials.size() == r2.trials.size();
  for (std::size_t i = 0; same && i < r1.trials.size(); ++i) {
    same = r1.trials[i].best_metric == r2.trials[i].best_metric &&
           r1.trials[i].time_to_best == r2.trials[i].time_to_best &&
           r1.trials[i].selected_metric == r2.trials[i].selected_metric;
  }
  check(same && r1.pairing_ok(), "determinism/replay");

  std::string detail = failed.empty() ? "all property groups hold" : "failed:";
  for (const auto& f : failed) detail += " " + f + ";";
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form surrogate", closed_form},
      {"estimator unbiasedness", unbiased},
      {"estimate norm bound", norm_bound},
      {"surrogate peak alignment", alignment},
      {"phase retrieval d=100", phase_retrieval},
      {"two-layer (20,19)", two_layer},
      {"two-layer (20,20) protocol", exact_parameterization},
      {"property suite", properties},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << " [" << fmt("%.1f", secs) << " s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
