#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "powerhp/analysis/curve.hpp"
#include "powerhp/harness/runner.hpp"

namespace powerhp {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form of a double.
inline std::string fmt_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace detail

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
  detail::close_out(out, path);
}

inline void write_trajectory_csv(const std::filesystem::path& path, const std::vector<StepRecord>& records) {
  auto out = detail::open_out(path);
  out << "t,n_t,sigma_t,alpha_t,grad_norm,validation\n";
  for (const auto& r : records) {
    out << r.t << ',' << fmt_double(r.n_t) << ',' << fmt_double(r.sigma_t) << ',' << fmt_double(r.alpha_t)
        << ',' << fmt_double(r.grad_norm) << ',' << (r.validation ? fmt_double(*r.validation) : "") << '\n';
  }
  detail::close_out(out, path);
}

inline void write_curve_csv(const std::filesystem::path& path, const std::vector<CurveSample>& samples,
                            double power, double sigma, bool normalized) {
  auto out = detail::open_out(path);
  out << "# N=" << fmt_double(power) << " sigma=" << fmt_double(sigma) << " normalized=" << (normalized ? 1 : 0)
      << '\n';
  out << "mu,G,G_N,F_N_sigma\n";
  for (const auto& s : samples) {
    out << fmt_double(s.mu) << ',' << fmt_double(s.g_value) << ',' << fmt_double(s.gn_value) << ','
        << fmt_double(s.f_value) << '\n';
  }
  detail::close_out(out, path);
}

/// JSON document of a trial's instance and shared initial point.
inline json instance_json(const TrialProblem& tp, std::uint64_t seed, int trial_id) {
  json j;
  j["seed"] = seed;
  j["trial_id"] = trial_id;
  j["trial_stream"] = trial_stream(seed, trial_id).stream_id();
  j["initial"] = detail::vector_json(tp.initial);
  std::visit(
      [&](const auto& inst) {
        using I = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<I, PhaseRetrievalInstance>) {
          j["problem"] = "phase_retrieval";
          j["x0"] = detail::vector_json(inst.x0);
          j["sensing"] = detail::matrix_json(inst.sensing);
          j["y"] = detail::vector_json(inst.y);
          j["validation_sensing"] = detail::matrix_json(inst.validation_sensing);
          j["validation_y"] = detail::vector_json(inst.validation_y);
        } else if constexpr (std::is_same_v<I, TwoLayerInstance>) {
          j["problem"] = "two_layer";
          j["teacher"] = detail::matrix_json(inst.teacher);
          j["width"] = inst.width;
          j["validation_set"] = detail::matrix_json(inst.validation_set);
          // The test set is a pure function of the trial stream; it is omitted
          // to keep the document small.
          j["test_size"] = inst.test_set.rows();
        } else {
          j["problem"] = "landscape1d";
          j["half_width"] = inst.half_width();
        }
      },
      tp.instance);
  return j;
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

/// Writes spec.json, trials.csv, aggregate.csv, audit.csv and trials_detail.csv,
/// plus trajectories/ and instances/ when the protocol asks for them.
inline void persist(const ProtocolReport& report, const std::filesystem::path& out_dir) {
  detail::ensure_dir(out_dir);
  write_json(out_dir / "spec.json", to_json(report.spec));

  {
    const auto path = out_dir / "trials.csv";
    auto out = detail::open_out(path);
    out << "trial_id,method,best_metric,success,time_to_best,aborted\n";
    for (const auto& r : report.trials) {
      out << r.trial_id << ',' << r.method << ',' << fmt_double(r.best_metric) << ',' << (r.success ? 1 : 0)
          << ',' << r.time_to_best << ',' << (r.aborted ? 1 : 0) << '\n';
    }
    detail::close_out(out, path);
  }
  {
    const auto path = out_dir / "trials_detail.csv";
    auto out = detail::open_out(path);
    out << "trial_id,method,selected_metric,worst_metric,steps_completed,abort_reason\n";
    for (const auto& r : report.trials) {
      std::string reason = r.abort_reason;
      for (char& c : reason)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      out << r.trial_id << ',' << r.method << ',' << fmt_double(r.selected_metric) << ','
          << fmt_double(r.worst_metric) << ',' << r.steps_completed << ',' << reason << '\n';
    }
    detail::close_out(out, path);
  }
  {
    const auto path = out_dir / "aggregate.csv";
    auto out = detail::open_out(path);
    out << "method,mean_metric,success_rate,mean_time_to_best,t_vs_reference,dof\n";
    for (const auto& a : report.aggregates) {
      out << a.method << ',' << fmt_double(a.mean_metric) << ',' << fmt_double(a.success_rate) << ','
          << fmt_double(a.mean_time_to_best) << ',' << csv_optional(a.t_vs_reference) << ','
          << csv_optional(a.dof) << '\n';
    }
    detail::close_out(out, path);
  }
  {
    const auto path = out_dir / "audit.csv";
    auto out = detail::open_out(path);
    out << "trial_id,method,data_stream,data_position,consistent\n";
    for (const auto& a : report.audit) {
      out << a.trial_id << ',' << a.method << ',' << a.data_stream_id << ',' << a.data_position << ','
          << (a.consistent ? 1 : 0) << '\n';
    }
    detail::close_out(out, path);
  }
  if (report.spec.save_trajectories) {
    const auto dir = out_dir / "trajectories";
    detail::ensure_dir(dir);
    for (const auto& r : report.trials) {
      write_trajectory_csv(dir / (r.method + "_trial" + std::to_string(r.trial_id) + ".csv"),
                           r.trajectory.records);
    }
  }
  if (report.spec.save_instances) {
    const auto dir = out_dir / "instances";
    detail::ensure_dir(dir);
    for (std::size_t i = 0; i < report.problems.size(); ++i) {
      const int id = static_cast<int>(i);
      write_json(dir / ("trial" + std::to_string(id) + ".json"),
                 instance_json(report.problems[i], report.spec.seed, id));
    }
  }
}

}  // namespace powerhp
