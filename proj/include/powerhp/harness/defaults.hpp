#pragma once

#include "powerhp/optimizers/method.hpp"

// Versioned defaults table. Every value a resolved protocol can inherit lives
// here; bump kDefaultsVersion whenever one changes so that a spec.json written by
// an older binary is recognizably different.

namespace powerhp {

inline constexpr int kDefaultsVersion = 1;

enum class ProblemKind { kPhaseRetrieval, kTwoLayer, kLandscape1D };

namespace defaults {

inline constexpr std::int64_t kValidationEvery = 50;
inline constexpr std::uint64_t kSeed = 20240601;
inline constexpr int kTrials = 20;

// Phase retrieval.
inline constexpr int kPrDim = 100;
inline constexpr int kPrSamples = 400;
inline constexpr int kPrBatch = 32;
inline constexpr int kPrValidation = 128;
inline constexpr double kPrRatioLo = 2.0;
inline constexpr double kPrRatioHi = 4.0;
inline constexpr std::int64_t kPrIterations = 60000;
inline constexpr double kPrThreshold = 1e-3;
inline constexpr double kPrThresholdHard = 5e-2;  // d >= 200
inline constexpr int kPrHardDim = 200;

// Two-layer teacher-student.
inline constexpr int kTlInput = 20;
inline constexpr int kTlWidth = 19;
inline constexpr int kTlBatch = 30;
inline constexpr int kTlValidation = 512;
inline constexpr int kTlTest = 5000;
inline constexpr std::int64_t kTlIterations = 35000;
inline constexpr double kTlThreshold = 1e-3;

// Landscape1D.
inline constexpr double kLsStart = 0.9;
inline constexpr double kLsHalfWidth = 0.1;
inline constexpr int kLsBatch = 8;
inline constexpr int kLsValidation = 256;
inline constexpr std::int64_t kLsIterations = 2000;
inline constexpr double kLsThreshold = 0.05;

inline int batch_size(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kPhaseRetrieval: return kPrBatch;
    case ProblemKind::kTwoLayer: return kTlBatch;
    case ProblemKind::kLandscape1D: return kLsBatch;
  }
  return kPrBatch;
}

// Power-homotopy schedule per problem family. The power scale must match the
// magnitude of f: exp(N f) underflows for N |f| >> 1, so phase retrieval (f in
// the hundreds) runs at small N while the bounded landscape runs near N = 1.
// phi_ratio is left at 0 and resolved from the horizon T.
inline PowerHPConfig powerhp(ProblemKind kind) {
  PowerHPConfig c;
  c.schedule.phi_ratio = 0.0;
  switch (kind) {
    case ProblemKind::kPhaseRetrieval:
      c.schedule.n0 = 2e-3;
      c.schedule.delta = 8e-3;
      c.schedule.sigma0 = 0.3;
      c.schedule.b = 1e-5;
      c.schedule.beta = 0.9998;
      c.schedule.gamma = 0.01;
      c.schedule.alpha_scale = 4.0;
      c.k_pop = 4;
      c.j_batch = kPrBatch;
      break;
    case ProblemKind::kTwoLayer:
      c.schedule.n0 = 1.0;
      c.schedule.delta = 4.0;
      c.schedule.sigma0 = 0.01;
      c.schedule.b = 1e-3;
      c.schedule.beta = 0.9998;
      c.schedule.gamma = 0.01;
      c.schedule.alpha_scale = 4.0;
      c.k_pop = 1;
      c.j_batch = kTlBatch;
      break;
    case ProblemKind::kLandscape1D:
      c.schedule.n0 = 0.05;
      c.schedule.delta = 0.15;
      c.schedule.sigma0 = 0.8;
      c.schedule.b = 0.01;
      c.schedule.beta = 0.999;
      c.schedule.gamma = 0.05;
      c.schedule.alpha_scale = 0.1;
      c.k_pop = 256;
      c.j_batch = kLsBatch;
      break;
  }
  return c;
}

// Baseline defaults: SGD lr 1e-3; momentum 0.9; Adam/AdamW (1e-3, 0.9, 0.999,
// 1e-8) with AdamW decay 1e-2; SAM rho 0.05; SLGH gamma 0.9999, sigma0 0.5.
inline MethodConfig method(ProblemKind problem, MethodKind kind) {
  const int batch = batch_size(problem);
  MethodConfig c = default_method_config(kind);
  std::visit(
      [&](auto& cfg) {
        using C = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<C, PowerHPConfig>) {
          cfg = powerhp(problem);
        } else {
          cfg.j_batch = batch;
        }
      },
      c);
  return c;
}

}  // namespace defaults
}  // namespace powerhp
