#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "powerhp/harness/defaults.hpp"

namespace powerhp {

using json = nlohmann::json;

inline std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kPhaseRetrieval: return "phase_retrieval";
    case ProblemKind::kTwoLayer: return "two_layer";
    case ProblemKind::kLandscape1D: return "landscape1d";
  }
  return "unknown";
}

inline ProblemKind problem_kind_from_string(std::string_view s) {
  for (auto k : {ProblemKind::kPhaseRetrieval, ProblemKind::kTwoLayer, ProblemKind::kLandscape1D}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("problem.kind: unknown problem '" + std::string(s) +
                    "' (expected phase_retrieval, two_layer or landscape1d)");
}

struct ProblemParams {
  ProblemKind kind = ProblemKind::kPhaseRetrieval;
  // phase_retrieval
  int d = defaults::kPrDim;
  int n_samples = defaults::kPrSamples;
  double ratio_lo = defaults::kPrRatioLo;
  double ratio_hi = defaults::kPrRatioHi;
  // two_layer
  int k = defaults::kTlInput;
  int n = defaults::kTlWidth;
  int test_size = defaults::kTlTest;
  // landscape1d
  double mu0 = defaults::kLsStart;
  double half_width = defaults::kLsHalfWidth;
  // all
  int validation_size = defaults::kPrValidation;

  bool operator==(const ProblemParams&) const = default;
};

/// A fully resolved experiment: every default is materialized so the JSON
/// form reproduces the run exactly.
struct ProtocolSpec {
  int version = 1;
  int defaults_version = kDefaultsVersion;
  ProblemParams problem;
  int n_trials = defaults::kTrials;
  std::int64_t T = defaults::kPrIterations;
  double success_threshold = defaults::kPrThreshold;
  std::int64_t validation_every = defaults::kValidationEvery;
  std::uint64_t seed = defaults::kSeed;
  std::vector<MethodSpec> methods;
  std::string reference;  // method name the t statistics compare against
  bool save_trajectories = false;
  bool save_instances = false;

  const MethodSpec& method(std::string_view name) const {
    for (const auto& m : methods)
      if (m.name == name) return m;
    throw ConfigError("no method named '" + std::string(name) + "'");
  }

  void validate() const {
    if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (T < 1) throw ConfigError("T must be >= 1");
    if (!(success_threshold > 0.0)) throw ConfigError("success_threshold must be > 0");
    if (validation_every < 1) throw ConfigError("validation_every must be >= 1");
    if (methods.empty()) throw ConfigError("methods must be non-empty");
    std::set<std::string> names;
    for (const auto& m : methods) {
      m.validate();
      if (!names.insert(m.name).second) throw ConfigError("duplicate method name '" + m.name + "'");
    }
    if (!names.count(reference)) throw ConfigError("reference '" + reference + "' is not a listed method");
    const auto& p = problem;
    if (p.validation_size < 1) throw ConfigError("problem.validation_size must be >= 1");
    switch (p.kind) {
      case ProblemKind::kPhaseRetrieval: {
        if (p.d < 1) throw ConfigError("problem.d must be >= 1");
        if (p.n_samples < 1) throw ConfigError("problem.n_samples must be >= 1");
        const double ratio = static_cast<double>(p.n_samples) / p.d;
        if (ratio < p.ratio_lo || ratio > p.ratio_hi) {
          throw ConfigError("problem: N/d = " + std::to_string(ratio) + " outside ratio_band [" +
                            std::to_string(p.ratio_lo) + ", " + std::to_string(p.ratio_hi) + "]");
        }
        break;
      }
      case ProblemKind::kTwoLayer:
        if (p.k < 1 || p.n < 1) throw ConfigError("problem.k and problem.n must be >= 1");
        if (p.test_size != 5000) throw ConfigError("problem.test_size must be 5000");
        break;
      case ProblemKind::kLandscape1D:
        if (!(p.half_width >= 0.0)) throw ConfigError("problem.half_width must be >= 0");
        break;
    }
  }
};

namespace detail {

// Reads typed fields from a JSON object, rejecting unknown keys and type errors
// with the offending path in the message.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    const std::string where = path_.empty() ? key : path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(where + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<std::int64_t>() < 0) {
          throw ConfigError(where + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(where + ": expected a string");
    }
    out = it->template get<T>();
  }

  void allow(const char* key) { seen_.insert(key); }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError((path_.empty() ? "" : path_ + ".") + it.key() + ": unknown field");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline json to_json(const MethodSpec& m) {
  json j;
  j["name"] = m.name;
  j["kind"] = std::string(to_string(m.kind));
  std::visit(
      [&](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, PowerHPConfig>) {
          j["n0"] = c.schedule.n0;
          j["delta"] = c.schedule.delta;
          j["sigma0"] = c.schedule.sigma0;
          j["b"] = c.schedule.b;
          j["beta"] = c.schedule.beta;
          j["gamma"] = c.schedule.gamma;
          j["phi_ratio"] = c.schedule.phi_ratio;
          j["alpha_scale"] = c.schedule.alpha_scale;
          j["k_pop"] = c.k_pop;
          j["j_batch"] = c.j_batch;
          j["exponent_clamp"] = c.exponent_clamp;
        } else if constexpr (std::is_same_v<C, SgdConfig>) {
          j["lr"] = c.lr;
          j["j_batch"] = c.j_batch;
        } else if constexpr (std::is_same_v<C, MomentumConfig>) {
          j["lr"] = c.lr;
          j["momentum"] = c.momentum;
          j["j_batch"] = c.j_batch;
        } else if constexpr (std::is_same_v<C, AdamConfig>) {
          j["lr"] = c.lr;
          j["beta1"] = c.beta1;
          j["beta2"] = c.beta2;
          j["eps"] = c.eps;
          j["weight_decay"] = c.weight_decay;
          j["j_batch"] = c.j_batch;
        } else if constexpr (std::is_same_v<C, SamConfig>) {
          j["lr"] = c.lr;
          j["rho"] = c.rho;
          j["j_batch"] = c.j_batch;
        } else if constexpr (std::is_same_v<C, SlghConfig>) {
          j["lr"] = c.lr;
          j["sigma0"] = c.sigma0;
          j["gamma"] = c.gamma;
          j["k_pop"] = c.k_pop;
          j["j_batch"] = c.j_batch;
          j["eta"] = c.eta;
          j["sigma_floor"] = c.sigma_floor;
        }
      },
      m.config);
  return j;
}

/// Parses one method entry, filling unspecified fields from the defaults table
/// for `problem`. "kind" defaults to "name"; phi_ratio = 0 means "derive from T".
inline MethodSpec method_from_json(const json& j, ProblemKind problem, std::int64_t horizon,
                                   const std::string& path) {
  detail::FieldReader r(j, path);
  MethodSpec m;
  r.read("name", m.name);
  std::string kind = m.name;
  r.read("kind", kind);
  if (m.name.empty()) m.name = kind;
  if (kind.empty()) throw ConfigError(path + ": method needs a name or kind");
  m.kind = method_kind_from_string(kind);
  m.config = defaults::method(problem, m.kind);
  std::visit(
      [&](auto& c) {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, PowerHPConfig>) {
          r.read("n0", c.schedule.n0);
          r.read("delta", c.schedule.delta);
          r.read("sigma0", c.schedule.sigma0);
          r.read("b", c.schedule.b);
          r.read("beta", c.schedule.beta);
          r.read("gamma", c.schedule.gamma);
          r.read("phi_ratio", c.schedule.phi_ratio);
          r.read("alpha_scale", c.schedule.alpha_scale);
          r.read("k_pop", c.k_pop);
          r.read("j_batch", c.j_batch);
          r.read("exponent_clamp", c.exponent_clamp);
          if (c.schedule.phi_ratio == 0.0) c.schedule.phi_ratio = default_phi_ratio(horizon);
        } else if constexpr (std::is_same_v<C, SgdConfig>) {
          r.read("lr", c.lr);
          r.read("j_batch", c.j_batch);
        } else if constexpr (std::is_same_v<C, MomentumConfig>) {
          r.read("lr", c.lr);
          r.read("momentum", c.momentum);
          r.read("j_batch", c.j_batch);
        } else if constexpr (std::is_same_v<C, AdamConfig>) {
          r.read("lr", c.lr);
          r.read("beta1", c.beta1);
          r.read("beta2", c.beta2);
          r.read("eps", c.eps);
          r.read("weight_decay", c.weight_decay);
          r.read("j_batch", c.j_batch);
        } else if constexpr (std::is_same_v<C, SamConfig>) {
          r.read("lr", c.lr);
          r.read("rho", c.rho);
          r.read("j_batch", c.j_batch);
        } else if constexpr (std::is_same_v<C, SlghConfig>) {
          r.read("lr", c.lr);
          r.read("sigma0", c.sigma0);
          r.read("gamma", c.gamma);
          r.read("k_pop", c.k_pop);
          r.read("j_batch", c.j_batch);
          r.read("eta", c.eta);
          r.read("sigma_floor", c.sigma_floor);
        }
      },
      m.config);
  r.finish();
  try {
    m.validate();
    std::visit(
        [&](const auto& c) {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, AdamConfig>) {
            c.validate(m.kind == MethodKind::kAdamW ? "adamw" : "adam");
          } else if constexpr (std::is_same_v<C, SlghConfig>) {
            c.validate(m.kind == MethodKind::kSlghR ? "slghr" : "slghd");
          } else {
            c.validate();
          }
        },
        m.config);
  } catch (const ConfigError& e) {
    throw ConfigError(path + " (" + m.name + "): " + e.what());
  }
  return m;
}

inline json to_json(const ProblemParams& p) {
  json j;
  j["kind"] = std::string(to_string(p.kind));
  j["validation_size"] = p.validation_size;
  switch (p.kind) {
    case ProblemKind::kPhaseRetrieval:
      j["d"] = p.d;
      j["n_samples"] = p.n_samples;
      j["ratio_band"] = json::array({p.ratio_lo, p.ratio_hi});
      break;
    case ProblemKind::kTwoLayer:
      j["k"] = p.k;
      j["n"] = p.n;
      j["test_size"] = p.test_size;
      break;
    case ProblemKind::kLandscape1D:
      j["mu0"] = p.mu0;
      j["half_width"] = p.half_width;
      break;
  }
  return j;
}

inline ProblemParams problem_from_json(const json& j) {
  detail::FieldReader r(j, "problem");
  std::string kind;
  r.read("kind", kind);
  if (kind.empty()) throw ConfigError("problem.kind: missing");
  ProblemParams p;
  p.kind = problem_kind_from_string(kind);
  switch (p.kind) {
    case ProblemKind::kPhaseRetrieval:
      p.validation_size = defaults::kPrValidation;
      r.read("d", p.d);
      r.read("n_samples", p.n_samples);
      if (j.contains("ratio_band")) {
        r.allow("ratio_band");
        const auto& band = j.at("ratio_band");
        if (!band.is_array() || band.size() != 2 || !band[0].is_number() || !band[1].is_number()) {
          throw ConfigError("problem.ratio_band: expected [lo, hi]");
        }
        p.ratio_lo = band[0].get<double>();
        p.ratio_hi = band[1].get<double>();
      }
      break;
    case ProblemKind::kTwoLayer:
      p.validation_size = defaults::kTlValidation;
      r.read("k", p.k);
      r.read("n", p.n);
      r.read("test_size", p.test_size);
      break;
    case ProblemKind::kLandscape1D:
      p.validation_size = defaults::kLsValidation;
      r.read("mu0", p.mu0);
      r.read("half_width", p.half_width);
      break;
  }
  r.read("validation_size", p.validation_size);
  r.finish();
  return p;
}

inline double default_threshold(const ProblemParams& p) {
  switch (p.kind) {
    case ProblemKind::kPhaseRetrieval:
      return p.d >= defaults::kPrHardDim ? defaults::kPrThresholdHard : defaults::kPrThreshold;
    case ProblemKind::kTwoLayer: return defaults::kTlThreshold;
    case ProblemKind::kLandscape1D: return defaults::kLsThreshold;
  }
  return defaults::kPrThreshold;
}

inline std::int64_t default_iterations(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kPhaseRetrieval: return defaults::kPrIterations;
    case ProblemKind::kTwoLayer: return defaults::kTlIterations;
    case ProblemKind::kLandscape1D: return defaults::kLsIterations;
  }
  return defaults::kPrIterations;
}

inline json to_json(const ProtocolSpec& s) {
  json j;
  j["version"] = s.version;
  j["defaults_version"] = s.defaults_version;
  j["problem"] = to_json(s.problem);
  j["n_trials"] = s.n_trials;
  j["T"] = s.T;
  j["success_threshold"] = s.success_threshold;
  j["validation_every"] = s.validation_every;
  j["seed"] = s.seed;
  j["reference"] = s.reference;
  j["save_trajectories"] = s.save_trajectories;
  j["save_instances"] = s.save_instances;
  j["methods"] = json::array();
  for (const auto& m : s.methods) j["methods"].push_back(to_json(m));
  return j;
}

/// Resolves a (possibly partial) protocol document. Missing fields take the
/// defaults for the problem family; with no "methods" the protocol compares
/// powerhp, adam and sgd.
inline ProtocolSpec protocol_from_json(const json& j) {
  detail::FieldReader r(j, "");
  ProtocolSpec s;
  r.read("version", s.version);
  if (s.version != 1) throw ConfigError("version: unsupported protocol version " + std::to_string(s.version));
  r.read("defaults_version", s.defaults_version);
  if (!j.contains("problem")) throw ConfigError("problem: missing");
  r.allow("problem");
  s.problem = problem_from_json(j.at("problem"));
  s.T = default_iterations(s.problem.kind);
  s.success_threshold = default_threshold(s.problem);
  r.read("n_trials", s.n_trials);
  r.read("T", s.T);
  r.read("success_threshold", s.success_threshold);
  r.read("validation_every", s.validation_every);
  r.read("seed", s.seed);
  r.read("save_trajectories", s.save_trajectories);
  r.read("save_instances", s.save_instances);
  r.read("reference", s.reference);
  r.allow("methods");
  if (j.contains("methods")) {
    const auto& ms = j.at("methods");
    if (!ms.is_array()) throw ConfigError("methods: expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const json& entry = ms[i];
      const std::string path = "methods[" + std::to_string(i) + "]";
      if (entry.is_string()) {
        s.methods.push_back(method_from_json(json{{"name", entry.get<std::string>()}}, s.problem.kind, s.T, path));
      } else {
        s.methods.push_back(method_from_json(entry, s.problem.kind, s.T, path));
      }
    }
  } else {
    for (const char* name : {"powerhp", "adam", "sgd"}) {
      s.methods.push_back(method_from_json(json{{"name", name}}, s.problem.kind, s.T, "methods"));
    }
  }
  r.finish();
  if (s.reference.empty() && !s.methods.empty()) s.reference = s.methods.front().name;
  s.validate();
  return s;
}

inline ProtocolSpec load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return protocol_from_json(j);
}

}  // namespace powerhp
