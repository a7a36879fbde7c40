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

// Shared domain types: labeled representation datasets, the four accuracy
// measurements of a noisy-label audit, and the gap decomposition built on
// top of them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rrm {

using ClassIndex = std::uint32_t;
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NTrain(eta) was requested but no corrupted sample occurred in any trial.
class UndefinedNTrainError : public std::runtime_error {
 public:
  UndefinedNTrainError()
      : std::runtime_error(
            "NTrain(eta) is undefined: no corrupted sample in any trial") {}
};

/// An n x d matrix of representation vectors with class labels in
/// {0, ..., k-1} and, optionally, augmentation group ids.
///
/// Construction validates every invariant; a constructed value is always
/// well-formed.
class LabeledEmbeddings {
 public:
  LabeledEmbeddings(FeatureMatrix features, std::vector<ClassIndex> labels,
                    std::uint32_t num_classes,
                    std::optional<std::vector<std::uint32_t>> group_ids =
                        std::nullopt);

  const FeatureMatrix& features() const { return features_; }
  const std::vector<ClassIndex>& labels() const { return labels_; }
  std::uint32_t num_classes() const { return num_classes_; }
  const std::optional<std::vector<std::uint32_t>>& group_ids() const {
    return group_ids_;
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }

  /// Row i as a contiguous view (storage is row-major).
  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim(), dim()};
  }

  /// Same rows, permuted: result row j is this row perm[j].
  LabeledEmbeddings permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const LabeledEmbeddings&,
                         const LabeledEmbeddings&) = default;

 private:
  FeatureMatrix features_;
  std::vector<ClassIndex> labels_;
  std::uint32_t num_classes_;
  std::optional<std::vector<std::uint32_t>> group_ids_;
};

/// Throws ContractViolation unless every label is < k.
void check_labels(std::span<const ClassIndex> labels, std::uint32_t k);

enum class NoiseVariant { UniformAll, UniformOther };
enum class BoundDenominator { Eta, EmpiricalFlipRate };

std::string to_string(NoiseVariant v);
std::string to_string(BoundDenominator d);
NoiseVariant parse_noise_variant(const std::string& s);
BoundDenominator parse_bound_denominator(const std::string& s);

/// Train, Test, Train(eta) and NTrain(eta). The last one is empty when no
/// corrupted sample occurred in any trial.
struct AccuracyQuad {
  double train = 0.0;
  double test = 0.0;
  double train_noisy = 0.0;
  std::optional<double> ntrain_noisy;

  friend bool operator==(const AccuracyQuad&, const AccuracyQuad&) = default;
};

struct GapDecomposition {
  double robustness = 0.0;
  double rationality = 0.0;
  double memorization = 0.0;
  double generalization = 0.0;  // unclamped
  double rrm_bound = 0.0;
};

/// Fraction of positions where prediction equals label.
double accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> labels);

/// Clamped robustness/rationality/memorization gaps and their sum.
///
/// The gaps and the bound are evaluated in exact rational arithmetic over
/// the (binary) input values and rounded once, so the returned
/// generalization gap never exceeds the returned rrm_bound.
/// Throws UndefinedNTrainError when acc.ntrain_noisy is empty.
GapDecomposition assemble_gaps(const AccuracyQuad& acc);

/// Per-trial summary kept in a report.
struct TrialSummary {
  std::uint32_t trial_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t flips = 0;
  double train_noisy = 0.0;
  std::optional<double> ntrain_noisy;

  friend bool operator==(const TrialSummary&, const TrialSummary&) = default;
};

/// Everything one audit produces. Gaps that depend on NTrain(eta) are empty
/// when NTrain(eta) is undefined.
struct GapReport {
  double eta = 0.05;
  std::uint32_t trials = 0;
  std::size_t n_train = 0;
  std::uint32_t num_classes = 0;
  AccuracyQuad accuracies;
  double robustness_gap = 0.0;
  std::optional<double> rationality_gap;
  std::optional<double> memorization_gap;
  double generalization_gap = 0.0;
  std::optional<double> rrm_bound;
  std::optional<double> cdc;
  std::optional<double> cpc;
  std::optional<double> thm2_bound;
  std::optional<double> thm2_bound_capped;
  NoiseVariant noise_model = NoiseVariant::UniformAll;
  BoundDenominator bound_denominator = BoundDenominator::Eta;
  std::uint64_t base_seed = 0;
  std::vector<TrialSummary> per_trial;

  friend bool operator==(const GapReport&, const GapReport&) = default;
};

}  // namespace rrm
