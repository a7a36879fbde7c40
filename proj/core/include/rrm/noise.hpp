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

// The eta-noisy experiment: label corruption, repeated noisy retraining and
// the clean-label accuracies Train(eta) / NTrain(eta).

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rrm/classifier.hpp"
#include "rrm/core.hpp"

namespace rrm {

/// With probability eta a label is replaced: by a class drawn uniformly from
/// all k classes (UniformAll, so it may coincide with the original) or from
/// the k-1 other classes (UniformOther).
struct NoiseModel {
  NoiseVariant variant = NoiseVariant::UniformAll;
  double eta = 0.05;

  /// P(noisy label != clean label): eta*(k-1)/k or eta.
  double flip_probability(std::uint32_t k) const;

  /// P(N = deviation) for a deviation in {0..k-1}.
  double deviation_probability(std::uint32_t deviation, std::uint32_t k) const;

  void validate() const;
};

/// One realization of the experiment on the full train set.
struct NoisyTrial {
  std::uint32_t trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> noise_deviations;  // (noisy - clean) mod k
  std::vector<ClassIndex> train_predictions;
  std::vector<bool> flip_mask;  // deviation != 0

  friend bool operator==(const NoisyTrial&, const NoisyTrial&) = default;
};

struct CorruptedLabels {
  std::vector<ClassIndex> noisy;
  std::vector<std::uint32_t> deviations;
};

/// i.i.d. per-sample corruption, reproducible from `seed`.
CorruptedLabels corrupt_labels(std::span<const ClassIndex> labels,
                               std::uint32_t k, const NoiseModel& model,
                               std::uint64_t seed);

struct CleanAccuracies {
  double train = 0.0;
  double test = 0.0;
};

/// Trains once on clean labels; Train and Test of that classifier.
CleanAccuracies run_clean(const Trainer& trainer, const LabeledEmbeddings& train,
                          const LabeledEmbeddings& test, std::uint64_t seed);

/// Seeds used by trial t: derive_seed(base_seed, t) for the trial, with the
/// noise drawn from derive_seed(trial_seed, 0) and the trainer called with
/// derive_seed(trial_seed, 1).
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint32_t trial);

/// K independent noisy retrainings. Trials may run concurrently (`threads`,
/// 0 = hardware concurrency); the result is ordered by trial index and is
/// identical for every thread count. A trainer exception is rethrown as
/// TrialFailure carrying the trial index.
std::vector<NoisyTrial> run_noisy_trials(const Trainer& trainer,
                                         const LabeledEmbeddings& train,
                                         const NoiseModel& model,
                                         std::uint32_t trials,
                                         std::uint64_t base_seed,
                                         unsigned threads = 1);

class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::uint32_t trial, const std::string& what);
  std::uint32_t trial() const { return trial_; }

 private:
  std::uint32_t trial_;
};

/// Pooled counts behind the noisy accuracies.
struct NoisyAccuracies {
  double train_noisy = 0.0;
  std::optional<double> ntrain_noisy;  // empty: no corrupted sample at all
  std::uint64_t total_samples = 0;
  std::uint64_t corrupted_samples = 0;
  std::uint64_t corrupted_correct = 0;
};

/// Train(eta) averages clean-label correctness over all trials and samples;
/// NTrain(eta) pools the corrupted positions of all trials.
NoisyAccuracies noisy_accuracies(std::span<const NoisyTrial> trials,
                                 std::span<const ClassIndex> clean_labels);

/// Same quantities for a single trial.
NoisyAccuracies noisy_accuracies(const NoisyTrial& trial,
                                 std::span<const ClassIndex> clean_labels);

}  // namespace rrm
