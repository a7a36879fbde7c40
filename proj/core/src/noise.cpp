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

#include "rrm/noise.hpp"

#include <exception>
#include <sstream>

#include "rrm/parallel.hpp"
#include "rrm/rng.hpp"

namespace rrm {

double NoiseModel::flip_probability(std::uint32_t k) const {
  if (variant == NoiseVariant::UniformOther) return eta;
  return eta * static_cast<double>(k - 1) / static_cast<double>(k);
}

double NoiseModel::deviation_probability(std::uint32_t deviation,
                                         std::uint32_t k) const {
  if (deviation >= k) throw ContractViolation("deviation outside {0..k-1}");
  const double flip = flip_probability(k);
  if (deviation == 0) return 1.0 - flip;
  return flip / static_cast<double>(k - 1);
}

void NoiseModel::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) {
    std::ostringstream msg;
    msg << "noise level eta must lie in (0,1), got " << eta;
    throw ContractViolation(msg.str());
  }
}

CorruptedLabels corrupt_labels(std::span<const ClassIndex> labels,
                               std::uint32_t k, const NoiseModel& model,
                               std::uint64_t seed) {
  if (k < 2) throw ContractViolation("corrupt_labels: k must be >= 2");
  model.validate();
  check_labels(labels, k);

  Rng rng(seed);
  CorruptedLabels out;
  out.noisy.resize(labels.size());
  out.deviations.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::uint32_t deviation = 0;
    if (rng.bernoulli(model.eta)) {
      if (model.variant == NoiseVariant::UniformAll) {
        const auto replacement = static_cast<std::uint32_t>(rng.uniform_index(k));
        deviation = (replacement + k - labels[i]) % k;
      } else {
        deviation = 1 + static_cast<std::uint32_t>(rng.uniform_index(k - 1));
      }
    }
    out.deviations[i] = deviation;
    out.noisy[i] = (labels[i] + deviation) % k;
  }
  return out;
}

CleanAccuracies run_clean(const Trainer& trainer, const LabeledEmbeddings& train,
                          const LabeledEmbeddings& test, std::uint64_t seed) {
  if (train.dim() != test.dim()) {
    throw ContractViolation("run_clean: train/test feature dimensions differ");
  }
  if (train.num_classes() != test.num_classes()) {
    throw ContractViolation("run_clean: train/test class counts differ");
  }
  const ClassifierPtr model = trainer(train, train.labels(), seed);
  CleanAccuracies out;
  out.train = accuracy(model->predict_rows(train.features()), train.labels());
  out.test = accuracy(model->predict_rows(test.features()), test.labels());
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint32_t trial) {
  return derive_seed(base_seed, trial);
}

TrialFailure::TrialFailure(std::uint32_t trial, const std::string& what)
    : std::runtime_error("trial " + std::to_string(trial) + ": " + what),
      trial_(trial) {}

std::vector<NoisyTrial> run_noisy_trials(const Trainer& trainer,
                                         const LabeledEmbeddings& train,
                                         const NoiseModel& model,
                                         std::uint32_t trials,
                                         std::uint64_t base_seed,
                                         unsigned threads) {
  if (trials < 1) throw ContractViolation("run_noisy_trials: trials must be >= 1");
  model.validate();
  const std::uint32_t k = train.num_classes();

  std::vector<NoisyTrial> out(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto index = static_cast<std::uint32_t>(t);
    NoisyTrial& trial = out[t];
    trial.trial_index = index;
    trial.seed = trial_seed(base_seed, index);
    CorruptedLabels corrupted =
        corrupt_labels(train.labels(), k, model, derive_seed(trial.seed, 0));
    try {
      const ClassifierPtr fitted =
          trainer(train, corrupted.noisy, derive_seed(trial.seed, 1));
      trial.train_predictions = fitted->predict_rows(train.features());
    } catch (const std::exception& e) {
      throw TrialFailure(index, e.what());
    }
    trial.flip_mask.resize(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      trial.flip_mask[i] = corrupted.deviations[i] != 0;
    }
    trial.noise_deviations = std::move(corrupted.deviations);
  });
  return out;
}

namespace {

void accumulate(const NoisyTrial& trial, std::span<const ClassIndex> clean,
                std::uint64_t& correct, NoisyAccuracies& acc) {
  if (trial.train_predictions.size() != clean.size() ||
      trial.flip_mask.size() != clean.size()) {
    throw ContractViolation("noisy_accuracies: trial length differs from labels");
  }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const bool hit = trial.train_predictions[i] == clean[i];
    correct += hit ? 1 : 0;
    if (trial.flip_mask[i]) {
      ++acc.corrupted_samples;
      acc.corrupted_correct += hit ? 1 : 0;
    }
  }
  acc.total_samples += clean.size();
}

void finish(std::uint64_t correct, NoisyAccuracies& acc) {
  acc.train_noisy =
      static_cast<double>(correct) / static_cast<double>(acc.total_samples);
  if (acc.corrupted_samples > 0) {
    acc.ntrain_noisy = static_cast<double>(acc.corrupted_correct) /
                       static_cast<double>(acc.corrupted_samples);
  }
}

}  // namespace

NoisyAccuracies noisy_accuracies(std::span<const NoisyTrial> trials,
                                 std::span<const ClassIndex> clean_labels) {
  if (trials.empty()) throw ContractViolation("noisy_accuracies: no trials");
  NoisyAccuracies acc;
  std::uint64_t correct = 0;
  for (const NoisyTrial& t : trials) accumulate(t, clean_labels, correct, acc);
  finish(correct, acc);
  return acc;
}

NoisyAccuracies noisy_accuracies(const NoisyTrial& trial,
                                 std::span<const ClassIndex> clean_labels) {
  return noisy_accuracies(std::span<const NoisyTrial>(&trial, 1), clean_labels);
}

}  // namespace rrm
