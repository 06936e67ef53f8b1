#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "powerhp/analysis/stats.hpp"
#include "powerhp/harness/protocol.hpp"
#include "powerhp/optimizers/run.hpp"
#include "powerhp/problems/landscape1d.hpp"
#include "powerhp/problems/phase_retrieval.hpp"
#include "powerhp/problems/two_layer.hpp"

namespace powerhp {

// Root stream of trial `trial_id`; every per-trial draw descends from it.
inline RngStream trial_stream(std::uint64_t seed, int trial_id) {
  return RngStream(seed, splitmix64(static_cast<std::uint64_t>(trial_id) + 1));
}

// The private noise stream of a method inside a trial.
inline RngStream method_noise_stream(const RngStream& trial, std::string_view method_name) {
  return trial.substream(RngStream::kNoise).substream(fnv1a(method_name));
}

/// Instance of a trial, as generated from its kInstance / kValidation streams.
using ProblemInstance = std::variant<PhaseRetrievalInstance, TwoLayerInstance, Landscape1D>;

struct TrialProblem {
  ProblemInstance instance;
  Vector initial;
};

inline TrialProblem make_trial_problem(const ProblemParams& p, const RngStream& trial) {
  RngStream inst_rng = trial.substream(RngStream::kInstance);
  switch (p.kind) {
    case ProblemKind::kPhaseRetrieval: {
      auto draw = pr_generate(p.d, p.n_samples, inst_rng, p.validation_size);
      return {std::move(draw.instance), std::move(draw.initial)};
    }
    case ProblemKind::kTwoLayer: {
      auto draw = tl_generate(p.k, p.n, inst_rng, p.validation_size, p.test_size);
      return {std::move(draw.instance), std::move(draw.initial)};
    }
    case ProblemKind::kLandscape1D: {
      Vector init(1);
      init[0] = p.mu0;
      return {Landscape1D(trial.substream(RngStream::kValidation), p.validation_size, p.half_width), init};
    }
  }
  throw ConfigError("unknown problem kind");
}

/// Calls fn(problem) with the StochasticProblem view of the instance.
template <class Fn>
decltype(auto) with_problem(const ProblemInstance& instance, Fn&& fn) {
  return std::visit(
      [&](const auto& inst) -> decltype(auto) {
        using I = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<I, PhaseRetrievalInstance>) {
          return fn(PhaseRetrieval(inst));
        } else if constexpr (std::is_same_v<I, TwoLayerInstance>) {
          return fn(TwoLayer(inst));
        } else {
          return fn(inst);
        }
      },
      instance);
}

struct TrialReport {
  int trial_id = 0;
  std::string method;
  // Smallest ground-truth metric over scored iterates.
  double best_metric = 0.0;
  bool success = false;
  // Iteration of the validation-selected iterate.
  std::int64_t time_to_best = 0;
  bool aborted = false;
  std::string abort_reason;
  double selected_metric = 0.0;  // metric at the validation-selected iterate
  double worst_metric = 0.0;
  std::int64_t steps_completed = 0;
  std::uint64_t data_stream_id = 0;
  std::uint64_t data_position = 0;
  Trajectory trajectory;  // records only when the protocol saves trajectories
};

struct MethodAggregate {
  std::string method;
  double mean_metric = 0.0;
  double success_rate = 0.0;
  double mean_time_to_best = 0.0;
  // Welch t of (reference - this method) on best_metric; empty for the
  // reference itself and when both samples are degenerate.
  std::optional<double> t_vs_reference;
  std::optional<double> dof;
};

struct AuditEntry {
  int trial_id = 0;
  std::string method;
  std::uint64_t data_stream_id = 0;
  std::uint64_t data_position = 0;
  bool consistent = true;
};

struct ProtocolReport {
  ProtocolSpec spec;
  std::vector<TrialReport> trials;  // ordered by (trial_id, method order)
  std::vector<MethodAggregate> aggregates;
  std::vector<AuditEntry> audit;
  std::vector<TrialProblem> problems;  // kept only when the protocol saves instances

  bool pairing_ok() const {
    return std::all_of(audit.begin(), audit.end(), [](const AuditEntry& a) { return a.consistent; });
  }
  const MethodAggregate& aggregate(std::string_view name) const {
    for (const auto& a : aggregates)
      if (a.method == name) return a;
    throw ConfigError("no aggregate for method '" + std::string(name) + "'");
  }
};

/// Runs every method of the protocol on one trial. Each method gets its own
/// copy of the trial's data stream, so methods consume identical mini-batches
/// step for step.
inline std::vector<TrialReport> run_trial(const ProtocolSpec& spec, int trial_id, const TrialProblem& tp) {
  const RngStream trial = trial_stream(spec.seed, trial_id);
  std::vector<TrialReport> out;
  with_problem(tp.instance, [&](const auto& problem) {
    RunOptions opts;
    opts.validation_every = spec.validation_every;
    opts.keep_records = spec.save_trajectories;
    opts.metric = [&problem](const Vector& w) { return problem.metric(w); };
    for (const auto& m : spec.methods) {
      StepStreams streams{trial.substream(RngStream::kData), method_noise_stream(trial, m.name)};
      RunResult r = run(m, problem, tp.initial, spec.T, std::move(streams), opts);
      TrialReport rep;
      rep.trial_id = trial_id;
      rep.method = m.name;
      rep.aborted = r.trajectory.aborted;
      rep.worst_metric = r.worst_metric.value_or(problem.metric(tp.initial));
      // A diverged run counts as failed and reports its worst recorded metric.
      rep.best_metric = rep.aborted ? rep.worst_metric : r.min_metric.value_or(rep.worst_metric);
      rep.success = !rep.aborted && rep.best_metric <= spec.success_threshold;
      rep.time_to_best = r.best_t;
      rep.abort_reason = r.trajectory.abort_reason;
      rep.selected_metric = r.selected_metric.value_or(rep.best_metric);
      rep.steps_completed = r.steps_completed;
      rep.data_stream_id = r.data_stream_id;
      rep.data_position = r.data_position;
      rep.trajectory = std::move(r.trajectory);
      out.push_back(std::move(rep));
    }
  });
  return out;
}

// Methods that share a batch size and ran the same number of steps must have
// consumed the same data-stream words.
inline std::vector<AuditEntry> audit_pairing(const ProtocolSpec& spec, const std::vector<TrialReport>& trials) {
  auto batch_of = [&](const std::string& name) {
    return std::visit([](const auto& c) { return c.j_batch; }, spec.method(name).config);
  };
  std::vector<AuditEntry> out;
  for (const auto& r : trials) {
    AuditEntry a{r.trial_id, r.method, r.data_stream_id, r.data_position, true};
    for (const auto& o : trials) {
      if (o.trial_id != r.trial_id) continue;
      if (o.data_stream_id != r.data_stream_id) a.consistent = false;
      if (o.steps_completed == r.steps_completed && batch_of(o.method) == batch_of(r.method) &&
          o.data_position != r.data_position) {
        a.consistent = false;
      }
    }
    out.push_back(a);
  }
  return out;
}

inline std::vector<MethodAggregate> aggregate_trials(const ProtocolSpec& spec,
                                                     const std::vector<TrialReport>& trials) {
  auto metrics_of = [&](const std::string& name) {
    std::vector<double> v;
    for (const auto& r : trials)
      if (r.method == name) v.push_back(r.best_metric);
    return v;
  };
  const std::vector<double> ref = metrics_of(spec.reference);
  std::vector<MethodAggregate> out;
  for (const auto& m : spec.methods) {
    MethodAggregate a;
    a.method = m.name;
    std::vector<double> ttb;
    int successes = 0;
    for (const auto& r : trials) {
      if (r.method != m.name) continue;
      ttb.push_back(static_cast<double>(r.time_to_best));
      successes += r.success ? 1 : 0;
    }
    const std::vector<double> metrics = metrics_of(m.name);
    a.mean_metric = mean(metrics);
    a.success_rate = static_cast<double>(successes) / static_cast<double>(metrics.size());
    a.mean_time_to_best = mean(ttb);
    if (m.name != spec.reference && metrics.size() >= 2) {
      try {
        const WelchResult w = welch_t(ref, metrics);
        a.t_vs_reference = w.t;
        a.dof = w.dof;
      } catch (const DomainError&) {
      }
    }
    out.push_back(a);
  }
  return out;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

using ProgressFn = std::function<void(int trials_done, int trials_total)>;

/// Runs all trials of `spec` on `threads` workers (0 = hardware concurrency).
/// Results do not depend on the thread count.
inline ProtocolReport run_protocol(const ProtocolSpec& spec, int threads = 0, ProgressFn progress = {}) {
  spec.validate();
  const int n = spec.n_trials;
  std::vector<std::vector<TrialReport>> per_trial(static_cast<std::size_t>(n));
  std::vector<std::optional<TrialProblem>> problems(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        TrialProblem tp = make_trial_problem(spec.problem, trial_stream(spec.seed, i));
        per_trial[static_cast<std::size_t>(i)] = run_trial(spec, i, tp);
        if (spec.save_instances) problems[static_cast<std::size_t>(i)] = std::move(tp);
        const int d = done.fetch_add(1) + 1;
        if (progress) {
          std::lock_guard lock(mu);
          progress(d, n);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::clamp(resolve_threads(threads), 1, n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ProtocolReport report;
  report.spec = spec;
  for (auto& v : per_trial)
    for (auto& r : v) report.trials.push_back(std::move(r));
  if (spec.save_instances)
    for (auto& p : problems) report.problems.push_back(std::move(*p));
  report.aggregates = aggregate_trials(spec, report.trials);
  report.audit = audit_pairing(spec, report.trials);
  return report;
}

}  // namespace powerhp
