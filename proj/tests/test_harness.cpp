#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "powerhp/harness/persist.hpp"

using namespace powerhp;
namespace fs = std::filesystem;

namespace {

// Small, fast protocol on the landscape.
ProtocolSpec small_landscape(int trials = 4, std::int64_t T = 200) {
  return protocol_from_json(json{{"problem", {{"kind", "landscape1d"}}},
                                 {"n_trials", trials},
                                 {"T", T},
                                 {"methods", {"powerhp", "adam", "sgd"}}});
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("powerhp_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string expect_config_error(const json& j) {
  try {
    protocol_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ConfigError for " << j.dump();
  return "";
}

}  // namespace

// ---- protocol parsing ------------------------------------------------------------

TEST(Protocol, DefaultsResolvePerProblem) {
  const auto pr = protocol_from_json(json{{"problem", {{"kind", "phase_retrieval"}}}});
  EXPECT_EQ(pr.T, 60000);
  EXPECT_EQ(pr.success_threshold, 1e-3);
  EXPECT_EQ(pr.problem.d, 100);
  EXPECT_EQ(pr.problem.n_samples, 400);
  ASSERT_EQ(pr.methods.size(), 3u);
  EXPECT_EQ(pr.reference, "powerhp");
  const auto& ph = std::get<PowerHPConfig>(pr.methods[0].config);
  EXPECT_DOUBLE_EQ(ph.schedule.phi_ratio, default_phi_ratio(60000));
  EXPECT_EQ(std::get<AdamConfig>(pr.method("adam").config).j_batch, 32);

  const auto hard = protocol_from_json(
      json{{"problem", {{"kind", "phase_retrieval"}, {"d", 200}, {"n_samples", 600}}}});
  EXPECT_EQ(hard.success_threshold, 5e-2);

  const auto tl = protocol_from_json(json{{"problem", {{"kind", "two_layer"}}}});
  EXPECT_EQ(tl.T, 35000);
  EXPECT_EQ(tl.success_threshold, 1e-3);
  EXPECT_EQ(tl.problem.validation_size, 512);
  EXPECT_EQ(std::get<SgdConfig>(tl.method("sgd").config).j_batch, 30);
}

TEST(Protocol, JsonRoundTrip) {
  json doc = {{"problem", {{"kind", "two_layer"}, {"k", 6}, {"n", 5}}},
              {"n_trials", 3},
              {"T", 40},
              {"seed", 77},
              {"reference", "adam"},
              {"methods",
               {json{{"name", "powerhp"}, {"alpha_scale", 0.5}},
                json{{"name", "fast_adam"}, {"kind", "adam"}, {"lr", 0.01}},
                "adam",
                "adamw",
                "sam",
                "slghr",
                json{{"name", "slghd"}, {"eta", 0.2}},
                "momentum",
                "sgd"}}};
  const auto a = protocol_from_json(doc);
  const json ja = to_json(a);
  const auto b = protocol_from_json(ja);
  EXPECT_EQ(to_json(b), ja);
  EXPECT_EQ(b.problem, a.problem);
  EXPECT_EQ(b.reference, "adam");
  EXPECT_EQ(b.method("fast_adam").kind, MethodKind::kAdam);
  EXPECT_EQ(std::get<AdamConfig>(b.method("fast_adam").config).lr, 0.01);
  EXPECT_EQ(std::get<AdamConfig>(b.method("adamw").config).weight_decay, 1e-2);
  EXPECT_EQ(std::get<SlghConfig>(b.method("slghd").config).eta, 0.2);
}

TEST(Protocol, ErrorsNameTheField) {
  EXPECT_NE(expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"bogus", 1}}).find("bogus: unknown field"),
            std::string::npos);
  EXPECT_NE(expect_config_error({{"problem", {{"kind", "landscape1d"}, {"zz", 1}}}}).find("problem.zz"),
            std::string::npos);
  EXPECT_NE(expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"methods", {json{{"name", "sgd"}, {"lr", -1}}}}})
                .find("methods[0]"),
            std::string::npos);
  EXPECT_NE(expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"T", "many"}}).find("T: expected an integer"),
            std::string::npos);
  EXPECT_NE(expect_config_error({{"problem", {{"kind", "nope"}}}}).find("problem.kind"), std::string::npos);
  expect_config_error({{"problem", {{"kind", "phase_retrieval"}, {"n_samples", 1000}}}});
  expect_config_error({{"problem", {{"kind", "two_layer"}, {"test_size", 100}}}});
  expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"methods", {"sgd", "sgd"}}});
  expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"reference", "adam"}, {"methods", {"sgd"}}});
  expect_config_error({{"problem", {{"kind", "landscape1d"}}}, {"version", 2}});
  expect_config_error({{"n_trials", 2}});
}

// ---- protocol execution ------------------------------------------------------------

TEST(Runner, RowCountsAndOrder) {
  const auto spec = small_landscape(3);
  const auto report = run_protocol(spec, 2);
  ASSERT_EQ(report.trials.size(), 9u);
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    EXPECT_EQ(report.trials[i].trial_id, static_cast<int>(i / 3));
    EXPECT_EQ(report.trials[i].method, spec.methods[i % 3].name);
  }
  EXPECT_EQ(report.aggregates.size(), 3u);
  EXPECT_EQ(report.audit.size(), 9u);
}

TEST(Runner, AggregatesRecomputeFromTrials) {
  const auto spec = small_landscape(5);
  const auto report = run_protocol(spec, 0);
  std::vector<double> ref;
  for (const auto& r : report.trials)
    if (r.method == "powerhp") ref.push_back(r.best_metric);
  for (const auto& a : report.aggregates) {
    std::vector<double> m, ttb;
    int wins = 0;
    for (const auto& r : report.trials) {
      if (r.method != a.method) continue;
      m.push_back(r.best_metric);
      ttb.push_back(static_cast<double>(r.time_to_best));
      wins += r.success;
      EXPECT_EQ(r.success, !r.aborted && r.best_metric <= spec.success_threshold);
      EXPECT_LE(r.best_metric, r.selected_metric);
      EXPECT_LE(r.best_metric, r.worst_metric);
    }
    EXPECT_EQ(a.mean_metric, mean(m));
    EXPECT_EQ(a.mean_time_to_best, mean(ttb));
    EXPECT_EQ(a.success_rate, wins / 5.0);
    if (a.method == "powerhp") {
      EXPECT_FALSE(a.t_vs_reference.has_value());
    } else {
      ASSERT_TRUE(a.t_vs_reference.has_value());
      const auto w = welch_t(ref, m);
      EXPECT_EQ(*a.t_vs_reference, w.t);
      EXPECT_EQ(*a.dof, w.dof);
    }
  }
}

TEST(Runner, DegenerateSamplesLeaveTStatisticEmpty) {
  auto spec = protocol_from_json(json{{"problem", {{"kind", "landscape1d"}, {"mu0", 5.0}}},
                                      {"n_trials", 3},
                                      {"T", 5},
                                      {"methods", {"sgd", "adam"}}});
  // Outside [-1, 1] the landscape is flat, so no method moves and every metric is equal.
  const auto report = run_protocol(spec, 1);
  for (const auto& r : report.trials) EXPECT_EQ(r.best_metric, 5.5);
  EXPECT_FALSE(report.aggregate("adam").t_vs_reference.has_value());
  EXPECT_FALSE(report.aggregate("adam").dof.has_value());
}

TEST(Runner, ResultsIndependentOfThreadCount) {
  const auto spec = small_landscape(6);
  const auto one = run_protocol(spec, 1);
  const auto many = run_protocol(spec, 4);
  ASSERT_EQ(one.trials.size(), many.trials.size());
  for (std::size_t i = 0; i < one.trials.size(); ++i) {
    EXPECT_EQ(one.trials[i].best_metric, many.trials[i].best_metric);
    EXPECT_EQ(one.trials[i].time_to_best, many.trials[i].time_to_best);
    EXPECT_EQ(one.trials[i].data_position, many.trials[i].data_position);
  }
}

TEST(Runner, PairingAuditPasses) {
  const auto spec = small_landscape(4);
  const auto report = run_protocol(spec, 0);
  EXPECT_TRUE(report.pairing_ok());
  for (const auto& r : report.trials) {
    EXPECT_EQ(r.data_stream_id, trial_stream(spec.seed, r.trial_id).substream(RngStream::kData).stream_id());
  }
}

TEST(Runner, PairingAuditDetectsMismatch) {
  const auto spec = small_landscape(1);
  auto report = run_protocol(spec, 1);
  report.trials[1].data_position += 1;
  EXPECT_FALSE(audit_pairing(spec, report.trials)[0].consistent);
}

TEST(Runner, TrialProblemsDeterministic) {
  ProblemParams p;
  p.kind = ProblemKind::kPhaseRetrieval;
  p.d = 10;
  p.n_samples = 30;
  const auto a = make_trial_problem(p, trial_stream(3, 1));
  const auto b = make_trial_problem(p, trial_stream(3, 1));
  const auto c = make_trial_problem(p, trial_stream(3, 2));
  EXPECT_EQ(a.initial, b.initial);
  EXPECT_EQ(std::get<PhaseRetrievalInstance>(a.instance).x0, std::get<PhaseRetrievalInstance>(b.instance).x0);
  EXPECT_NE(a.initial, c.initial);
}

// ---- persistence ------------------------------------------------------------------

TEST(Persist, FmtDoubleRoundTrips) {
  for (double v : {0.1, 0.8, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e-7}) {
    EXPECT_EQ(std::strtod(fmt_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(fmt_double(0.8), "0.8");
  EXPECT_EQ(fmt_double(3.0), "3");
}

TEST(Persist, WritesExpectedFiles) {
  auto spec = small_landscape(2, 60);
  spec.save_trajectories = true;
  spec.save_instances = true;
  const auto report = run_protocol(spec, 0);
  const auto dir = temp_dir("persist");
  persist(report, dir);

  const auto trials = read_lines(dir / "trials.csv");
  ASSERT_EQ(trials.size(), 7u);
  EXPECT_EQ(trials[0], "trial_id,method,best_metric,success,time_to_best,aborted");
  EXPECT_EQ(read_lines(dir / "aggregate.csv")[0], "method,mean_metric,success_rate,mean_time_to_best,t_vs_reference,dof");
  EXPECT_EQ(read_lines(dir / "aggregate.csv").size(), 4u);
  EXPECT_EQ(read_lines(dir / "audit.csv").size(), 7u);
  EXPECT_EQ(read_lines(dir / "trials_detail.csv").size(), 7u);

  const auto traj = read_lines(dir / "trajectories" / "powerhp_trial1.csv");
  ASSERT_EQ(traj.size(), 61u);
  EXPECT_EQ(traj[0], "t,n_t,sigma_t,alpha_t,grad_norm,validation");
  EXPECT_TRUE(fs::exists(dir / "instances" / "trial0.json"));

  std::ifstream in(dir / "spec.json");
  json j;
  in >> j;
  EXPECT_EQ(to_json(protocol_from_json(j)), to_json(spec));
  fs::remove_all(dir);
}

TEST(Persist, CurveCsvHeader) {
  const auto dir = temp_dir("curve");
  fs::create_directories(dir);
  const auto curve = surrogate_curve_1d(landscape1d_f, 1.0, 0.8, {-1, 1, 11});
  write_curve_csv(dir / "c.csv", curve, 1.0, 0.8, false);
  const auto lines = read_lines(dir / "c.csv");
  ASSERT_EQ(lines.size(), 13u);
  EXPECT_EQ(lines[0], "# N=1 sigma=0.8 normalized=0");
  EXPECT_EQ(lines[1], "mu,G,G_N,F_N_sigma");
  fs::remove_all(dir);
}

TEST(Persist, UnwritableDirectoryThrows) {
  const auto dir = temp_dir("blocked");
  { std::ofstream(dir.string()) << "file"; }
  EXPECT_THROW(write_json(dir / "x.json", json::object()), IoError);
  fs::remove_all(dir);
}
