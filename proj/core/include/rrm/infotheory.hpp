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

// Discrete entropy and mutual information (all values in nats), the plug-in
// complexity estimators over noisy trials, and the two small inequalities
// the memorization bound is built from.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rrm/core.hpp"
#include "rrm/noise.hpp"

namespace rrm {

/// A rows x cols table of counts.
class JointHistogram {
 public:
  JointHistogram(std::size_t rows, std::size_t cols);

  void add(std::size_t row, std::size_t col, std::uint64_t count = 1);

  std::uint64_t at(std::size_t row, std::size_t col) const {
    return counts_[row * cols_ + col];
  }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t total() const { return total_; }

  JointHistogram transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

enum class EstimatorKind { PlugIn, PlugInMillerMadow, Exact };

struct ComplexityEstimate {
  double value = 0.0;  // nats
  EstimatorKind estimator = EstimatorKind::PlugIn;
  std::uint64_t sample_count = 0;
  std::vector<double> per_index;  // C^pc only
};

/// -sum p ln p with 0 ln 0 = 0. The entries must be >= 0 and sum to 1
/// within 1e-9.
double entropy(std::span<const double> dist);

/// Plug-in entropy of a vector of counts.
double entropy_of_counts(std::span<const std::uint64_t> counts);

/// Plug-in I(row; col) = H(row) + H(col) - H(joint), clamped to
/// [0, min(H(row), H(col))] against floating residue. Clamps larger than
/// 1e-9 are reported on std::clog.
double mutual_information(const JointHistogram& hist);

/// Miller-Madow corrected I: plug-in I minus
/// (m_joint - m_row - m_col + 1) / (2 total), m = occupied cells; clamped at 0.
double mutual_information_miller_madow(const JointHistogram& hist);

/// Exact I of a joint probability table (entries >= 0 summing to 1).
double mutual_information(const Eigen::MatrixXd& joint);

/// n * I(Delta; N) with (Delta_i, N_i) pooled over every trial and index,
/// Delta = prediction - clean label and N = noisy - clean label (mod k).
ComplexityEstimate cdc_estimate(std::span<const NoisyTrial> trials,
                                std::span<const ClassIndex> clean_labels,
                                std::uint32_t k);

class InsufficientTrialsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sum_i I(prediction_i; noisy_label_i), each term from a k x k histogram
/// across trials. Needs >= 2 trials.
ComplexityEstimate cpc_estimate(std::span<const NoisyTrial> trials,
                                std::span<const ClassIndex> clean_labels,
                                std::uint32_t k, bool miller_madow = false,
                                unsigned threads = 1);

/// Mean of per-dataset estimates (distribution-level complexity).
ComplexityEstimate average_complexity(std::span<const ComplexityEstimate> estimates);

struct PinskerSides {
  double lhs = 0.0;  // |E[Z] - E[Z | B = 1]|
  double rhs = 0.0;  // sqrt(I(Z;B) / 2) / E[B]
  double mutual_information = 0.0;
};

/// Both sides of the Bernoulli deviation bound for a 2 x 2 joint of (Z, B)
/// (rows indexed by Z, columns by B).
PinskerSides pinsker_gap_bound(const Eigen::Matrix2d& joint);

/// p(w, x, y) over small alphabets, stored densely.
class TripleDistribution {
 public:
  TripleDistribution(std::size_t w_size, std::size_t x_size, std::size_t y_size);

  double& operator()(std::size_t w, std::size_t x, std::size_t y) {
    return p_[(w * x_size_ + x) * y_size_ + y];
  }
  double operator()(std::size_t w, std::size_t x, std::size_t y) const {
    return p_[(w * x_size_ + x) * y_size_ + y];
  }
  std::size_t w_size() const { return w_size_; }
  std::size_t x_size() const { return x_size_; }
  std::size_t y_size() const { return y_size_; }

  /// Joint of W against the pair (X, Y), the latter flattened as x*|Y|+y.
  Eigen::MatrixXd joint_w_xy() const;
  Eigen::MatrixXd joint_w_x() const;
  Eigen::MatrixXd joint_w_y() const;
  Eigen::MatrixXd joint_x_y() const;

 private:
  std::size_t w_size_, x_size_, y_size_;
  std::vector<double> p_;
};

class DependenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// I(W; X,Y) >= I(W;X) + I(W;Y) - 1e-12 for X, Y independent. Throws
/// DependenceError when |p(x,y) - p(x)p(y)| > 1e-12 anywhere.
bool mi_superadditivity_check(const TripleDistribution& dist);

}  // namespace rrm
