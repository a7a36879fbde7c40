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

#include "rrm/rationality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "rrm/bounds.hpp"
#include "rrm/parallel.hpp"
#include "rrm/rng.hpp"

namespace rrm {

namespace {

constexpr std::uint64_t kProcedureStream = 0x5EED5ULL;

struct RowHash {
  std::size_t operator()(const std::vector<double>& r) const {
    return static_cast<std::size_t>(hash_row(r));
  }
};

class TrivialRepresentationClassifier final : public Classifier {
 public:
  TrivialRepresentationClassifier(ClassifierPtr base,
                                  std::unordered_set<std::vector<double>, RowHash> seen,
                                  double mask_fraction, std::uint64_t salt, std::size_t dim)
      : base_(std::move(base)),
        seen_(std::move(seen)),
        mask_fraction_(mask_fraction),
        salt_(salt),
        zero_(dim, 0.0) {}

  ClassIndex predict(std::span<const double> x) const override {
    if (masked(x)) return base_->predict(zero_);
    return base_->predict(x);
  }

 private:
  bool masked(std::span<const double> x) const {
    if (seen_.contains(std::vector<double>(x.begin(), x.end()))) return false;
    const double u = static_cast<double>(hash_row(x, salt_) >> 11) * 0x1.0p-53;
    return u < mask_fraction_;
  }

  ClassifierPtr base_;
  std::unordered_set<std::vector<double>, RowHash> seen_;
  double mask_fraction_;
  std::uint64_t salt_;
  std::vector<double> zero_;
};

}  // namespace

void PotlConfig::validate() const {
  if (trials_per_test_point < 1) throw ContractViolation("procedure S needs M >= 1");
  noise.validate();
}

ClassIndex procedure_s_predict(const Trainer& trainer, const LabeledEmbeddings& stored_train,
                               std::span<const double> x, const PotlConfig& config,
                               std::uint64_t point_seed) {
  config.validate();
  if (x.size() != stored_train.dim()) {
    throw ContractViolation("procedure S: query dimension differs from stored data");
  }
  const std::uint32_t k = stored_train.num_classes();
  const std::size_t n = stored_train.size();
  std::vector<std::size_t> votes(k, 0);

  for (std::uint32_t m = 0; m < config.trials_per_test_point; ++m) {
    const std::uint64_t rep_seed = derive_seed(point_seed, m);
    CorruptedLabels corrupted =
        corrupt_labels(stored_train.labels(), k, config.noise, derive_seed(rep_seed, 0));
    Rng rng(derive_seed(rep_seed, 1));
    const auto replaced = static_cast<std::size_t>(rng.uniform_index(n));
    const auto inserted_label = static_cast<ClassIndex>(rng.uniform_index(k));

    FeatureMatrix features = stored_train.features();
    std::copy(x.begin(), x.end(), features.data() + replaced * x.size());
    corrupted.noisy[replaced] = inserted_label;
    const LabeledEmbeddings modified(std::move(features), corrupted.noisy, k);

    const ClassifierPtr fitted = trainer(modified, modified.labels(), derive_seed(rep_seed, 2));
    ++votes[fitted->predict(x)];
  }
  return static_cast<ClassIndex>(std::max_element(votes.begin(), votes.end()) -
                                 votes.begin());
}

PotlResult potl_experiment(const Trainer& trainer, const LabeledEmbeddings& train,
                           const LabeledEmbeddings& test, const PotlConfig& config,
                           std::uint32_t audit_trials) {
  config.validate();
  if (train.dim() != test.dim() || train.num_classes() != test.num_classes()) {
    throw ContractViolation("potl_experiment: train/test shapes differ");
  }
  AuditOptions options;
  options.threads = config.threads;
  const GapReport report =
      audit(trainer, train, test, config.noise, audit_trials, config.seed, options);

  std::vector<ClassIndex> predictions(test.size());
  const std::uint64_t stream = derive_seed(config.seed ^ kProcedureStream, 0);
  parallel_for(test.size(), config.threads, [&](std::size_t j) {
    predictions[j] =
        procedure_s_predict(trainer, train, test.row(j), config, derive_seed(stream, j));
  });

  PotlResult out;
  out.test_s = accuracy(predictions, test.labels());
  out.test_s_sigma = binomial_sigma(out.test_s, test.size());
  out.test_t = report.accuracies.test;
  out.train_noisy = report.accuracies.train_noisy;
  out.ntrain_noisy = report.accuracies.ntrain_noisy;
  out.gain = out.test_s - out.test_t;
  if (out.ntrain_noisy) {
    out.margin = out.test_s - *out.ntrain_noisy;
    out.assumption_holds = out.train_noisy >= *out.ntrain_noisy;
    out.informal_rhs = out.test_t + *report.rationality_gap;
  }
  return out;
}

Trainer trivial_representation_trainer(Trainer base, double mask_fraction,
                                       std::uint64_t salt) {
  if (!(mask_fraction >= 0.0 && mask_fraction <= 1.0)) {
    throw ContractViolation("mask fraction must lie in [0,1]");
  }
  return [base = std::move(base), mask_fraction, salt](
             const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
             std::uint64_t seed) -> ClassifierPtr {
    std::unordered_set<std::vector<double>, RowHash> seen;
    for (std::size_t i = 0; i < data.size(); ++i) {
      seen.emplace(data.row(i).begin(), data.row(i).end());
    }
    return std::make_shared<const TrivialRepresentationClassifier>(
        base(data, labels, seed), std::move(seen), mask_fraction, salt, data.dim());
  };
}

double mask_fraction_for_gap(double gap, std::uint32_t k) {
  if (k < 2) throw ContractViolation("mask_fraction_for_gap: k must be >= 2");
  const double chance_loss = 1.0 - 1.0 / static_cast<double>(k);
  const double f = gap / chance_loss;
  if (!(f >= 0.0 && f <= 1.0)) {
    throw ContractViolation("target rationality gap not reachable for this k");
  }
  return f;
}

Trainer noise_detecting_trainer(Trainer base, std::vector<ClassIndex> clean_labels) {
  auto zero = std::make_shared<const FunctionClassifier>(
      [](std::span<const double>) { return ClassIndex{0}; });
  return [base = std::move(base), clean = std::move(clean_labels), zero](
             const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
             std::uint64_t seed) -> ClassifierPtr {
    if (std::equal(labels.begin(), labels.end(), clean.begin(), clean.end())) {
      return base(data, labels, seed);
    }
    return zero;
  };
}

}  // namespace rrm
