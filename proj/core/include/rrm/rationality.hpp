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

// Procedure S: an inference-time transformation that turns a positive
// rationality gap into test accuracy by inserting the query point, with a
// uniformly random label, into an eta-noisy copy of the stored train set and
// retraining. Also the trainers behind the large-gap fixtures.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrm/classifier.hpp"
#include "rrm/core.hpp"
#include "rrm/noise.hpp"

namespace rrm {

struct PotlConfig {
  std::uint32_t trials_per_test_point = 1;  // M; majority vote when > 1
  NoiseModel noise{NoiseVariant::UniformAll, 0.05};
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

/// One prediction of procedure S at x. Each of the M repetitions corrupts
/// the stored labels with config.noise, replaces a uniformly chosen row by
/// (x, uniform label), retrains and evaluates at x. Votes are reduced by
/// majority, smallest class on ties. `point_seed` selects the randomness.
ClassIndex procedure_s_predict(const Trainer& trainer, const LabeledEmbeddings& stored_train,
                               std::span<const double> x, const PotlConfig& config,
                               std::uint64_t point_seed);

struct PotlResult {
  double test_s = 0.0;
  double test_s_sigma = 0.0;
  double test_t = 0.0;
  double train_noisy = 0.0;
  std::optional<double> ntrain_noisy;
  std::optional<double> margin;          // test_s - ntrain_noisy
  double gain = 0.0;                     // test_s - test_t
  std::optional<double> informal_rhs;    // test_t + rationality gap
  bool assumption_holds = false;         // Train(eta) >= NTrain(eta)
};

/// Runs procedure S on every test point and, through a regular audit with
/// `audit_trials` noisy trials, measures NTrain_T(eta) and Test_T. The
/// experiment still runs when the Train(eta) >= NTrain(eta) assumption
/// fails; assumption_holds reports it.
PotlResult potl_experiment(const Trainer& trainer, const LabeledEmbeddings& train,
                           const LabeledEmbeddings& test, const PotlConfig& config,
                           std::uint32_t audit_trials = 20);

/// Fixture trainer for a large rationality gap: the representation is the
/// identity on points of the training set, and the zero vector on a
/// `mask_fraction` share of all other points (chosen by a salted hash of the
/// row). `base` is fitted on the training set as given.
Trainer trivial_representation_trainer(Trainer base, double mask_fraction,
                                       std::uint64_t salt = 0);

/// Mask fraction that makes the expected rationality gap equal `gap` for a
/// trainer that is accurate on unmasked points and at chance (1/k) on
/// masked ones: gap / (1 - 1/k).
double mask_fraction_for_gap(double gap, std::uint32_t k);

/// Fixture trainer for a large robustness gap: `base` when the labels equal
/// `clean_labels`, the constant-0 classifier otherwise.
Trainer noise_detecting_trainer(Trainer base, std::vector<ClassIndex> clean_labels);

}  // namespace rrm
