#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "powerhp/optimizers/method.hpp"

namespace powerhp {

struct RunOptions {
  // Iterates with t % validation_every == 0, and the last one, are scored.
  std::int64_t validation_every = 50;
  bool keep_records = true;
  // Optional ground-truth metric (lower is better) evaluated at scored iterates.
  std::function<double(const Vector&)> metric;
};

struct Trajectory {
  std::vector<StepRecord> records;
  bool aborted = false;
  std::string abort_reason;
};

struct RunResult {
  Trajectory trajectory;
  std::int64_t steps_completed = 0;
  // Scored iterate with the highest validation score (earliest on ties). Falls
  // back to the initial point with best_t = 0 when nothing was scored.
  Vector best_point;
  std::int64_t best_t = 0;
  double best_validation = -std::numeric_limits<double>::infinity();
  Vector final_point;
  // Filled when RunOptions::metric is set.
  std::optional<double> selected_metric;  // metric at best_point
  std::optional<double> min_metric;       // min over scored iterates
  std::int64_t min_metric_t = 0;
  std::optional<double> worst_metric;     // max over finite scored iterates (and the start on abort)
  // Data-stream audit: identical (stream id, position) across methods of a trial
  // means they consumed identical mini-batch draws.
  std::uint64_t data_stream_id = 0;
  std::uint64_t data_position = 0;
};

/// Runs `T` steps of the method from `initial`, scoring validation at the
/// configured cadence and returning the validation-best iterate. A non-finite
/// iterate or other AbortError stops the run; the partial trajectory is kept and
/// flagged.
template <StochasticProblem P>
RunResult run(const MethodSpec& method, const P& problem, const Vector& initial, std::int64_t T,
              StepStreams streams, const RunOptions& opts = {}) {
  if (T < 1) throw ConfigError("run: T must be >= 1");
  if (opts.validation_every < 1) throw ConfigError("run: validation_every must be >= 1");
  if (initial.size() != problem.dim()) throw ConfigError("run: initial point has wrong dimension");
  Optimizer opt = make_optimizer(method, initial);

  RunResult out;
  out.best_point = initial;
  if (opts.keep_records) out.trajectory.records.reserve(static_cast<std::size_t>(T));

  auto track_metric = [&](const Vector& point, std::int64_t t, bool is_best) {
    if (!opts.metric) return;
    const double m = opts.metric(point);
    if (!std::isfinite(m)) return;
    if (is_best) out.selected_metric = m;
    if (!out.min_metric || m < *out.min_metric) {
      out.min_metric = m;
      out.min_metric_t = t;
    }
    if (!out.worst_metric || m > *out.worst_metric) out.worst_metric = m;
  };

  try {
    for (std::int64_t t = 1; t <= T; ++t) {
      StepRecord rec = std::visit([&](auto& o) { return o.step(problem, streams); }, opt);
      out.steps_completed = t;
      const Vector& point = std::visit([](auto& o) -> const Vector& { return o.point(); }, opt);
      if (t % opts.validation_every == 0 || t == T) {
        const double score = problem.validation_score(point);
        rec.validation = score;
        const bool is_best = std::isfinite(score) && (out.best_t == 0 || score > out.best_validation);
        if (is_best) {
          out.best_validation = score;
          out.best_point = point;
          out.best_t = t;
        }
        track_metric(point, t, is_best);
      }
      if (opts.keep_records) out.trajectory.records.push_back(rec);
    }
  } catch (const AbortError& e) {
    out.trajectory.aborted = true;
    out.trajectory.abort_reason = e.what();
    if (opts.metric) {
      const double m0 = opts.metric(initial);
      if (!out.worst_metric || m0 > *out.worst_metric) out.worst_metric = m0;
      if (!out.selected_metric) out.selected_metric = out.best_t == 0 ? m0 : opts.metric(out.best_point);
    }
  }
  out.final_point = std::visit([](auto& o) { return o.point(); }, opt);
  out.data_stream_id = streams.data.stream_id();
  out.data_position = streams.data.position();
  return out;
}

}  // namespace powerhp
