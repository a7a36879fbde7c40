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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rrm/core.hpp"

namespace rrm {

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ClassIndex predict(std::span<const double> x) const = 0;

  /// Predictions for every row; overridden where a batched path is cheaper.
  virtual std::vector<ClassIndex> predict_rows(const FeatureMatrix& rows) const;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

/// A training procedure: (data, labels to train on, seed) -> classifier.
/// `labels` overrides data.labels() and has the same length. Implementations
/// must be deterministic in their three arguments and safe to call
/// concurrently.
using Trainer = std::function<ClassifierPtr(
    const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
    std::uint64_t seed)>;

/// Wraps a plain function as a classifier.
class FunctionClassifier final : public Classifier {
 public:
  explicit FunctionClassifier(
      std::function<ClassIndex(std::span<const double>)> fn)
      : fn_(std::move(fn)) {}
  ClassIndex predict(std::span<const double> x) const override { return fn_(x); }

 private:
  std::function<ClassIndex(std::span<const double>)> fn_;
};

/// Smallest index attaining the maximum score.
ClassIndex argmax_smallest(std::span<const double> scores);

/// Hash of the bit patterns of a feature row (SplitMix64 chaining).
std::uint64_t hash_row(std::span<const double> row, std::uint64_t salt = 0);

}  // namespace rrm
