#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "powerhp/analysis/gradcheck.hpp"
#include "powerhp/harness/persist.hpp"

namespace powerhp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct BenchArgs {
  std::string config;
  std::string out;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iterations;
  std::vector<std::string> methods;
  bool save_trajectories = false;
  bool save_instances = false;
};

/// Applies command-line overrides to a protocol document before resolution, so
/// the resolved spec.json records them. --methods keeps the config's entry for a
/// listed name when there is one and otherwise adds that method with defaults.
inline json apply_overrides(json doc, const BenchArgs& a) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (a.trials) doc["n_trials"] = *a.trials;
  if (a.seed) doc["seed"] = *a.seed;
  if (a.iterations) doc["T"] = *a.iterations;
  if (a.save_trajectories) doc["save_trajectories"] = true;
  if (a.save_instances) doc["save_instances"] = true;
  if (!a.methods.empty()) {
    json existing = doc.contains("methods") ? doc["methods"] : json::array();
    if (!existing.is_array()) throw ConfigError("methods: expected an array");
    json chosen = json::array();
    for (const auto& name : a.methods) {
      json entry = json{{"name", name}};
      for (const auto& e : existing) {
        const std::string ename = e.is_string() ? e.get<std::string>()
                                  : e.is_object() && e.contains("name") && e["name"].is_string()
                                      ? e["name"].get<std::string>()
                                      : std::string();
        if (ename == name) entry = e;
      }
      chosen.push_back(entry);
    }
    doc["methods"] = chosen;
    if (doc.contains("reference") && doc["reference"].is_string() &&
        std::find(a.methods.begin(), a.methods.end(), doc["reference"].get<std::string>()) == a.methods.end()) {
      doc.erase("reference");
    }
  }
  return doc;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void print_aggregates(const ProtocolReport& report, std::ostream& out) {
  out << "method          mean_metric      success_rate  mean_time_to_best  t_vs_ref   dof\n";
  for (const auto& a : report.aggregates) {
    char line[160];
    std::snprintf(line, sizeof line, "%-15s %-16.6g %-13.3f %-18.1f %-10s %s\n", a.method.c_str(), a.mean_metric,
                  a.success_rate, a.mean_time_to_best,
                  a.t_vs_reference ? fmt_double(*a.t_vs_reference).substr(0, 8).c_str() : "-",
                  a.dof ? fmt_double(*a.dof).substr(0, 6).c_str() : "-");
    out << line;
  }
  if (!report.pairing_ok()) out << "warning: data-stream pairing audit failed (see audit.csv)\n";
}

inline int run_and_persist(const ProtocolSpec& spec, const std::string& out_dir, int threads, std::ostream& out,
                           std::ostream& err) {
  // spec.json goes out first so an interrupted run still leaves its config.
  detail::ensure_dir(out_dir);
  write_json(std::filesystem::path(out_dir) / "spec.json", to_json(spec));
  const ProtocolReport report = run_protocol(spec, threads, [&](int done, int total) {
    err << "\rtrials " << done << "/" << total << std::flush;
    if (done == total) err << '\n';
  });
  persist(report, out_dir);
  print_aggregates(report, out);
  return kExitOk;
}

inline std::vector<double> parse_number_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

/// Entry point of the powerhp tool. Returns 0 on success, 1 on a usage or
/// configuration error, 2 on a runtime failure (IO, failed check).
inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr) {
  CLI::App app{"Progressive power homotopy optimizer, baselines and benchmark harness", "powerhp"};
  app.require_subcommand(1);

  int threads = 0;
  std::vector<CLI::Option*> threads_opts;
  auto add_threads = [&](CLI::App* sub) {
    threads_opts.push_back(
        sub->add_option("--threads", threads, "worker threads for trials (0 = all cores, env POWERHP_THREADS)")
            ->check(CLI::NonNegativeNumber));
  };

  BenchArgs bench;
  int trials = 0;
  std::uint64_t seed = 0;
  std::int64_t iterations = 0;
  std::string methods;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark protocol from a JSON config");
  bench_cmd->add_option("--config", bench.config, "protocol config (JSON)")->required();
  bench_cmd->add_option("--out", bench.out, "output directory")->required();
  auto* trials_opt = bench_cmd->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  auto* seed_opt = bench_cmd->add_option("--seed", seed, "master seed");
  auto* iter_opt = bench_cmd->add_option("--T", iterations, "iterations per run")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--methods", methods, "comma-separated method names");
  bench_cmd->add_flag("--save-trajectories", bench.save_trajectories, "write per-run trajectory CSVs");
  bench_cmd->add_flag("--save-instances", bench.save_instances, "write per-trial instance JSON");
  add_threads(bench_cmd);

  std::string curve_problem = "landscape1d";
  std::string curve_powers = "0.5,1,2,4";
  double curve_sigma = 0.8;
  std::string curve_out;
  bool curve_normalize = false;
  double curve_lo = -1.0, curve_hi = 1.0, curve_step = 5e-4;
  auto* curve_cmd = app.add_subcommand("curve", "emit G, G_N and F_{N,sigma} curves as CSV");
  curve_cmd->add_option("--problem", curve_problem, "problem (landscape1d)");
  curve_cmd->add_option("--N", curve_powers, "comma-separated powers");
  curve_cmd->add_option("--sigma", curve_sigma, "smoothing scale")->check(CLI::PositiveNumber);
  curve_cmd->add_option("--out", curve_out, "output directory (stdout summary only when omitted)");
  curve_cmd->add_flag("--normalize", curve_normalize, "scale each column by its maximum");
  curve_cmd->add_option("--lo", curve_lo, "grid start");
  curve_cmd->add_option("--hi", curve_hi, "grid end");
  curve_cmd->add_option("--step", curve_step, "grid spacing")->check(CLI::PositiveNumber);

  std::string suite = "all";
  int points = 100;
  std::uint64_t check_seed = 1;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
  grad_cmd->add_option("--suite", suite, "suite name or 'all'");
  grad_cmd->add_option("--points", points, "random points per suite")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--seed", check_seed, "seed for the random points");

  std::string replay_spec, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a protocol from a resolved spec.json");
  replay_cmd->add_option("--spec", replay_spec, "resolved spec.json")->required();
  replay_cmd->add_option("--out", replay_out, "output directory")->required();
  add_threads(replay_cmd);

  if (argc <= 1) {
    err << app.help();
    return kExitConfig;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  // CLI11 silently drops env values that fail a check, so the variable is read here.
  const bool threads_flag = std::any_of(threads_opts.begin(), threads_opts.end(),
                                        [](const CLI::Option* o) { return o->count() > 0; });
  if (const char* env = std::getenv("POWERHP_THREADS"); env && *env && !threads_flag) {
    int v = -1;
    const std::string_view sv(env);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || v < 0) {
      err << "error: POWERHP_THREADS must be a non-negative integer, got '" << env << "'\n";
      return kExitConfig;
    }
    threads = v;
  }

  try {
    if (bench_cmd->parsed()) {
      if (*trials_opt) bench.trials = trials;
      if (*seed_opt) bench.seed = seed;
      if (*iter_opt) bench.iterations = iterations;
      if (!methods.empty()) {
        std::stringstream ss(methods);
        std::string name;
        while (std::getline(ss, name, ','))
          if (!name.empty()) bench.methods.push_back(name);
      }
      const ProtocolSpec spec = protocol_from_json(apply_overrides(read_json_file(bench.config), bench));
      return run_and_persist(spec, bench.out, threads, out, err);
    }
    if (replay_cmd->parsed()) {
      const ProtocolSpec spec = protocol_from_json(read_json_file(replay_spec));
      return run_and_persist(spec, replay_out, threads, out, err);
    }
    if (curve_cmd->parsed()) {
      if (curve_problem != "landscape1d") {
        throw ConfigError("--problem: curves are available for landscape1d only");
      }
      if (!(curve_hi > curve_lo)) throw ConfigError("--hi must exceed --lo");
      const auto powers = parse_number_list(curve_powers, "--N");
      const double span = (curve_hi - curve_lo) / curve_step;
      const auto steps = static_cast<int>(std::llround(span)) + 1;
      if (std::abs(span - std::round(span)) > 1e-9 * span) {
        throw ConfigError("--step must divide [--lo, --hi] evenly");
      }
      if (!curve_out.empty()) detail::ensure_dir(curve_out);
      CurveOptions opts;
      opts.normalize = curve_normalize;
      for (double power : powers) {
        if (!(power > 0.0)) throw ConfigError("--N: powers must be > 0");
        const auto samples = surrogate_curve_1d(landscape1d_f, power, curve_sigma, {curve_lo, curve_hi, steps}, opts);
        const double peak = curve_argmax_f(samples);
        out << "N=" << fmt_double(power) << " sigma=" << fmt_double(curve_sigma) << " argmax_F=" << fmt_double(peak)
            << " distance_to_peak=" << fmt_double(std::abs(peak - Landscape1D::kPeak)) << '\n';
        if (!curve_out.empty()) {
          const std::string file = "curve_N" + fmt_double(power) + "_sigma" + fmt_double(curve_sigma) + ".csv";
          write_curve_csv(std::filesystem::path(curve_out) / file, samples, power, curve_sigma, curve_normalize);
        }
      }
      return kExitOk;
    }
    if (grad_cmd->parsed()) {
      std::vector<std::string> names;
      if (suite == "all") {
        names = gradcheck_suites();
      } else {
        names.push_back(suite);
      }
      bool ok = true;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto res = gradcheck_suite(names[i], RngStream(check_seed, i + 1), points);
        out << (res.passed() ? "PASS " : "FAIL ") << res.name << " points=" << res.points
            << " max_rel_error=" << fmt_double(res.max_rel_error) << " tol=" << fmt_double(res.tolerance) << '\n';
        ok = ok && res.passed();
      }
      return ok ? kExitOk : kExitRuntime;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace powerhp::cli
