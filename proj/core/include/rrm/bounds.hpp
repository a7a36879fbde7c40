// Copyright 2026 The RRM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The memorization-gap bound from deviation complexity, the full audit that
// assembles a GapReport, and Monte-Carlo checks of the two robustness lemmas
// (least squares with margin, ERM over a finite class).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrm/core.hpp"
#include "rrm/infotheory.hpp"
#include "rrm/noise.hpp"
#include "rrm/trainers.hpp"

namespace rrm {

struct Thm2Bound {
  double cdc = 0.0;
  std::size_t n = 0;
  double eta_denominator = 0.0;
  double value = 0.0;         // sqrt(cdc / (2n)) / eta_denominator
  double capped_value = 0.0;  // min(value, 1)
};

/// Denominator is eta (Eta) or the model's exact flip probability
/// E[B] (EmpiricalFlipRate; equals eta under UniformOther).
Thm2Bound thm2_bound(double cdc, std::size_t n, const NoiseModel& model,
                     std::uint32_t k, BoundDenominator mode);

struct AuditOptions {
  BoundDenominator denominator = BoundDenominator::Eta;
  bool compute_cpc = false;
  bool miller_madow = false;
  unsigned threads = 1;
};

struct AuditResult {
  GapReport report;
  std::vector<NoisyTrial> trials;
};

/// Clean run + K noisy trials, the four accuracies, the three gaps, the
/// plug-in C^dc (and C^pc on request) and the memorization bound.
/// NTrain(eta) undefined leaves the NTrain-dependent fields empty.
AuditResult audit_with_trials(const Trainer& trainer, const LabeledEmbeddings& train,
                              const LabeledEmbeddings& test, const NoiseModel& model,
                              std::uint32_t trials, std::uint64_t seed,
                              const AuditOptions& options = {});

GapReport audit(const Trainer& trainer, const LabeledEmbeddings& train,
                const LabeledEmbeddings& test, const NoiseModel& model,
                std::uint32_t trials, std::uint64_t seed,
                const AuditOptions& options = {});

/// Seed used for the clean (noise-free) fit of an audit.
std::uint64_t clean_seed(std::uint64_t base_seed);

/// Binomial standard error sqrt(p (1 - p) / samples).
double binomial_sigma(double p, std::uint64_t samples);

struct RetentionRow {
  double gamma = 0.0;
  double margin_fraction = 0.0;  // share of points whose clean-label score leads by >= gamma
  double predicted = 0.0;        // p(gamma) - 4 E[B] / gamma^2
  double observed = 0.0;         // mean clean-label agreement after noisy refit
  double sigma = 0.0;
  bool holds = false;            // observed >= predicted - 3 sigma
};

/// For each gamma: margin fraction of the clean least-squares fit (margin of
/// the clean label over the best other class), the
/// predicted retention, and the observed fraction of train points whose
/// noisy-refit argmax equals the clean label, averaged over trials.
std::vector<RetentionRow> least_squares_robustness_check(
    const LabeledEmbeddings& data, const RidgeConfig& config, const NoiseModel& model,
    std::span<const double> gammas, std::uint32_t trials, std::uint64_t seed,
    unsigned threads = 1);

struct ErmRobustness {
  double train = 0.0;        // clean ERM training accuracy
  double train_noisy = 0.0;  // Monte-Carlo Train(eta)
  double gap = 0.0;          // train - train_noisy (unclamped)
  double bound = 0.0;        // 2 eta
  double sigma = 0.0;
  bool holds = false;        // gap <= bound + 3 sigma
};

ErmRobustness erm_robustness_check(const LabeledEmbeddings& data,
                                   const FiniteHypothesisClass& hypotheses,
                                   const NoiseModel& model, std::uint32_t trials,
                                   std::uint64_t seed, unsigned threads = 1);

}  // namespace rrm
