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

// Exact evaluation of the eta-noisy experiment for tiny instances: every
// noise pattern is materialized with its exact probability, so Train(eta),
// NTrain(eta) and the three complexity measures come out without sampling
// error. Used to certify the complexity chain and the memorization bound.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rrm/classifier.hpp"
#include "rrm/core.hpp"
#include "rrm/noise.hpp"

namespace rrm {

using ExactRational = boost::multiprecision::cpp_rational;

enum class OracleTrainerKind { Constant, Majority, Interpolator, ThresholdErm };

std::string to_string(OracleTrainerKind kind);
OracleTrainerKind parse_oracle_trainer(const std::string& name);

/// eta as an exact fraction num/den, 0 < num < den.
struct RationalEta {
  std::uint32_t num = 1;
  std::uint32_t den = 20;
  double value() const { return static_cast<double>(num) / den; }
};

inline constexpr std::size_t kMaxOraclePatterns = 59049;  // 3^10

/// A fully enumerable instance: n <= 10, k <= 3, k^n <= 3^10.
struct ExactScenario {
  LabeledEmbeddings train;
  OracleTrainerKind trainer_kind = OracleTrainerKind::Majority;
  ClassIndex constant_value = 0;  // Constant trainer only
  NoiseVariant noise = NoiseVariant::UniformOther;
  RationalEta eta{};

  NoiseModel noise_model() const { return {noise, eta.value()}; }
  /// Deterministic trainer handle (seed ignored).
  Trainer trainer() const;
};

class EnumerationLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExactQuantities {
  std::size_t patterns = 0;
  double probability_mass = 0.0;   // sum of pattern probabilities (double)
  ExactRational train_eta_exact;
  std::optional<ExactRational> ntrain_eta_exact;
  double train_eta = 0.0;
  std::optional<double> ntrain_eta;
  double flip_probability = 0.0;   // E[B]
  double cdc = 0.0;                // n I(Delta; N)
  double cpc = 0.0;                // sum_i I(p_i; noisy y_i)
  double cmdl = 0.0;               // H(g)
  double prediction_entropy = 0.0; // H(p-vector)
  double memorization_gap = 0.0;   // (Train(eta) - NTrain(eta))_+
  double thm2_rhs = 0.0;           // sqrt(cdc / 2n) / E[B]
  double thm2_rhs_eta = 0.0; // sqrt(cdc / 2n) / eta
};

/// Points on which a classifier is evaluated to identify it as a function:
/// the train rows plus, for one-dimensional data, one point below, between
/// and above the distinct train values. For the oracle trainer kinds (whose
/// outputs are constant between train values) this determines g exactly.
FeatureMatrix probe_points(const LabeledEmbeddings& train);

/// Enumerates every noise pattern. Throws EnumerationLimitError past the
/// size limits.
ExactQuantities enumerate(const ExactScenario& scenario);

struct ChainOptions {
  std::size_t max_n = 6;
  std::uint32_t max_k = 3;
  double tolerance = 1e-12;
  std::optional<std::filesystem::path> dump_dir;
};

struct ChainViolation {
  std::size_t scenario_index = 0;
  std::string description;
  std::optional<std::filesystem::path> dump_path;
};

struct ChainCertification {
  std::size_t scenarios = 0;
  std::vector<ChainViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Random tiny scenario (d = 1, UniformOther noise) from `seed`.
ExactScenario random_scenario(std::uint64_t seed, const ChainOptions& options = {});

/// Checks C^dc <= C^pc <= C^mdl and memorization_gap <= thm2_rhs on `count`
/// random scenarios. Violations are collected (and dumped when dump_dir is
/// set), not thrown.
ChainCertification certify_chain(std::size_t count, std::uint64_t seed,
                                 const ChainOptions& options = {});

}  // namespace rrm
