#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "powerhp/optimizers/baselines.hpp"
#include "powerhp/optimizers/powerhp.hpp"
#include "powerhp/optimizers/slgh.hpp"

namespace powerhp {

enum class MethodKind { kPowerHP, kSgd, kMomentum, kAdam, kAdamW, kSam, kSlghR, kSlghD };

inline std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::kPowerHP: return "powerhp";
    case MethodKind::kSgd: return "sgd";
    case MethodKind::kMomentum: return "momentum";
    case MethodKind::kAdam: return "adam";
    case MethodKind::kAdamW: return "adamw";
    case MethodKind::kSam: return "sam";
    case MethodKind::kSlghR: return "slghr";
    case MethodKind::kSlghD: return "slghd";
  }
  return "unknown";
}

inline MethodKind method_kind_from_string(std::string_view s) {
  for (auto k : {MethodKind::kPowerHP, MethodKind::kSgd, MethodKind::kMomentum, MethodKind::kAdam,
                 MethodKind::kAdamW, MethodKind::kSam, MethodKind::kSlghR, MethodKind::kSlghD}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown method kind '" + std::string(s) +
                    "' (expected powerhp, sgd, momentum, adam, adamw, sam, slghr or slghd)");
}

using MethodConfig =
    std::variant<PowerHPConfig, SgdConfig, MomentumConfig, AdamConfig, SamConfig, SlghConfig>;

/// A named optimizer configuration. `name` identifies the method in reports and
/// selects its private noise stream; `kind` selects the update rule.
struct MethodSpec {
  std::string name;
  MethodKind kind = MethodKind::kPowerHP;
  MethodConfig config = PowerHPConfig{};

  void validate() const {
    if (name.empty()) throw ConfigError("method name must be non-empty");
    const bool matches = std::visit(
        [this](const auto& c) {
          using C = std::decay_t<decltype(c)>;
          switch (kind) {
            case MethodKind::kPowerHP: return std::is_same_v<C, PowerHPConfig>;
            case MethodKind::kSgd: return std::is_same_v<C, SgdConfig>;
            case MethodKind::kMomentum: return std::is_same_v<C, MomentumConfig>;
            case MethodKind::kAdam:
            case MethodKind::kAdamW: return std::is_same_v<C, AdamConfig>;
            case MethodKind::kSam: return std::is_same_v<C, SamConfig>;
            case MethodKind::kSlghR:
            case MethodKind::kSlghD: return std::is_same_v<C, SlghConfig>;
          }
          return false;
        },
        config);
    if (!matches) throw ConfigError("method '" + name + "': config does not match kind");
  }
};

// Default configuration for each kind.
inline MethodConfig default_method_config(MethodKind kind) {
  switch (kind) {
    case MethodKind::kPowerHP: return PowerHPConfig{};
    case MethodKind::kSgd: return SgdConfig{};
    case MethodKind::kMomentum: return MomentumConfig{};
    case MethodKind::kAdam: return AdamConfig{};
    case MethodKind::kAdamW: {
      AdamConfig c;
      c.weight_decay = 1e-2;
      return c;
    }
    case MethodKind::kSam: return SamConfig{};
    case MethodKind::kSlghR:
    case MethodKind::kSlghD: return SlghConfig{};
  }
  return PowerHPConfig{};
}

using Optimizer = std::variant<PowerHP, Sgd, Momentum, Adam, Sam, Slgh>;

inline Optimizer make_optimizer(const MethodSpec& spec, const Vector& initial) {
  spec.validate();
  switch (spec.kind) {
    case MethodKind::kPowerHP: return PowerHP(std::get<PowerHPConfig>(spec.config), initial);
    case MethodKind::kSgd: return Sgd(std::get<SgdConfig>(spec.config), initial);
    case MethodKind::kMomentum: return Momentum(std::get<MomentumConfig>(spec.config), initial);
    case MethodKind::kAdam: return Adam(std::get<AdamConfig>(spec.config), initial, false);
    case MethodKind::kAdamW: return Adam(std::get<AdamConfig>(spec.config), initial, true);
    case MethodKind::kSam: return Sam(std::get<SamConfig>(spec.config), initial);
    case MethodKind::kSlghR:
      return Slgh(std::get<SlghConfig>(spec.config), initial, Slgh::Variant::kRatio);
    case MethodKind::kSlghD:
      return Slgh(std::get<SlghConfig>(spec.config), initial, Slgh::Variant::kDerivative);
  }
  throw ConfigError("unhandled method kind");
}

}  // namespace powerhp
