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

// Simple-fit training procedures: one-hot ridge regression (the linear probe),
// brute-force ERM over a finite hypothesis class, and label-only baselines.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrm/classifier.hpp"
#include "rrm/core.hpp"

namespace rrm {

struct RidgeConfig {
  double lambda = 1e-6;
  bool fit_bias = true;
  bool standardize = false;

  void validate() const;
};

/// The normal equations are singular (only possible with lambda == 0).
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(std::size_t rank, std::size_t size);
  std::size_t rank() const { return rank_; }
  std::size_t size() const { return size_; }

 private:
  std::size_t rank_;
  std::size_t size_;
};

/// k affine scores; prediction is the smallest index attaining the maximum.
class LinearClassifier final : public Classifier {
 public:
  /// weights: k x p where p = d (+1 if with_bias; the bias column is last).
  LinearClassifier(Eigen::MatrixXd weights, bool with_bias,
                   Eigen::VectorXd feature_mean, Eigen::VectorXd feature_scale);

  ClassIndex predict(std::span<const double> x) const override;
  std::vector<ClassIndex> predict_rows(const FeatureMatrix& rows) const override;

  Eigen::VectorXd scores(std::span<const double> x) const;
  /// n x k score matrix.
  Eigen::MatrixXd score_rows(const FeatureMatrix& rows) const;

  const Eigen::MatrixXd& weights() const { return weights_; }
  bool with_bias() const { return with_bias_; }

 private:
  Eigen::MatrixXd design(const FeatureMatrix& rows) const;

  Eigen::MatrixXd weights_;
  bool with_bias_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

/// Exact minimizer of sum_i ||W r_i - e_{y_i}||^2 + lambda ||W||^2 where r_i
/// is the (optionally standardized, optionally bias-extended) feature row.
/// Solved from the normal equations (R^T R + lambda I) W^T = R^T Y with a
/// Cholesky factorization, or conjugate gradients when p > 4096.
std::shared_ptr<const LinearClassifier> ridge_fit(
    const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
    const RidgeConfig& config);

/// The ridge system for given data, for residual checks.
struct NormalEquations {
  Eigen::MatrixXd gram;  // R^T R + lambda I
  Eigen::MatrixXd rhs;   // R^T Y
};
NormalEquations ridge_normal_equations(const LabeledEmbeddings& data,
                                       std::span<const ClassIndex> labels,
                                       const RidgeConfig& config);

/// Largest column-sum norm of gram * W^T - rhs, normalised by
/// 1 + ||rhs||. The fit must keep this below 1e-8.
double ridge_relative_residual(const LinearClassifier& model,
                               const NormalEquations& system);

struct Hypothesis {
  std::string name;
  std::function<ClassIndex(std::span<const double>)> rule;
};

/// An explicit, non-empty, ordered list of classifiers.
class FiniteHypothesisClass {
 public:
  explicit FiniteHypothesisClass(std::vector<Hypothesis> members);

  std::size_t size() const { return members_.size(); }
  const Hypothesis& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::vector<Hypothesis> members_;
};

/// The k constant classifiers.
FiniteHypothesisClass constant_class(std::uint32_t k);

/// Rules x[coordinate] >= t ? above : below over every ordered pair of
/// distinct classes, with t ranging over one value below the data minimum
/// and the midpoints between consecutive distinct values of the coordinate.
FiniteHypothesisClass threshold_class(const LabeledEmbeddings& data,
                                      std::size_t coordinate);

struct ErmResult {
  std::size_t index = 0;       // position in the class
  std::size_t errors = 0;      // empirical 0-1 errors on the training labels
  ClassifierPtr classifier;
};

/// A hypothesis with the fewest training errors; earliest on ties.
ErmResult erm_fit(const LabeledEmbeddings& data,
                  std::span<const ClassIndex> labels,
                  const FiniteHypothesisClass& hypotheses);

/// Fraction of points whose top score beats the runner-up by >= gamma.
class MarginProfile {
 public:
  explicit MarginProfile(std::vector<double> margins);

  /// p(gamma); non-increasing in gamma, p(0) = 1.
  double operator()(double gamma) const;
  const std::vector<double>& margins() const { return margins_; }

 private:
  std::vector<double> margins_;  // sorted ascending
};

MarginProfile margin_profile(const LinearClassifier& model,
                             const LabeledEmbeddings& data);
/// Profile of an explicit n x k score matrix.
MarginProfile margin_profile_from_scores(const Eigen::MatrixXd& scores);

// Trainer adapters. The seed is ignored by all of them.
Trainer ridge_trainer(RidgeConfig config = {});
Trainer erm_trainer(FiniteHypothesisClass hypotheses);
Trainer constant_trainer(ClassIndex value);
/// Predicts the most frequent training label everywhere (smallest on ties).
Trainer majority_trainer();
/// Memorizes the training table: an exact feature-row match returns its
/// label (majority, then smallest, among duplicates); anything else returns
/// `fallback`.
Trainer interpolating_trainer(ClassIndex fallback = 0);

}  // namespace rrm
