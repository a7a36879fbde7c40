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

#include "rrm/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "rrm/parallel.hpp"

namespace rrm {

namespace {

constexpr double kClampReportThreshold = 1e-9;

double clamp_mi(double value, double upper) {
  double clamped = std::max(value, 0.0);
  clamped = std::min(clamped, std::max(upper, 0.0));
  if (std::abs(clamped - value) > kClampReportThreshold) {
    std::clog << "rrm: mutual information " << value << " clamped to " << clamped
              << '\n';
  }
  return clamped;
}

struct Marginals {
  std::vector<std::uint64_t> rows;
  std::vector<std::uint64_t> cols;
};

Marginals marginals(const JointHistogram& h) {
  Marginals m{std::vector<std::uint64_t>(h.rows(), 0),
              std::vector<std::uint64_t>(h.cols(), 0)};
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) {
      m.rows[r] += h.at(r, c);
      m.cols[c] += h.at(r, c);
    }
  }
  return m;
}

std::size_t occupied(std::span<const std::uint64_t> counts) {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

void check_distribution(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw ContractViolation("probability entry < 0 or NaN");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "probabilities sum to " << sum << ", not 1";
    throw ContractViolation(msg.str());
  }
}

double entropy_unchecked(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

JointHistogram::JointHistogram(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), counts_(rows * cols, 0) {
  if (rows == 0 || cols == 0) throw ContractViolation("histogram needs non-empty axes");
}

void JointHistogram::add(std::size_t row, std::size_t col, std::uint64_t count) {
  if (row >= rows_ || col >= cols_) throw ContractViolation("histogram cell out of range");
  counts_[row * cols_ + col] += count;
  total_ += count;
}

JointHistogram JointHistogram::transposed() const {
  JointHistogram t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (at(r, c) > 0) t.add(c, r, at(r, c));
    }
  }
  return t;
}

double entropy(std::span<const double> dist) {
  check_distribution(dist);
  return entropy_unchecked(dist);
}

double entropy_of_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ContractViolation("entropy of an empty histogram");
  const auto n = static_cast<double>(total);
  double acc = 0.0;
  for (auto c : counts) {
    if (c > 0) acc += static_cast<double>(c) * std::log(static_cast<double>(c));
  }
  return std::max(0.0, std::log(n) - acc / n);
}

double mutual_information(const JointHistogram& hist) {
  if (hist.total() == 0) throw ContractViolation("mutual information of an empty histogram");
  const Marginals m = marginals(hist);
  const auto total = static_cast<long double>(hist.total());
  // sum_ij (n_ij / N) ln(n_ij N / (r_i c_j)); identical to H(row) + H(col)
  // - H(joint) and exact (zero) on a product-of-marginals table.
  long double acc = 0.0L;
  for (std::size_t r = 0; r < hist.rows(); ++r) {
    for (std::size_t c = 0; c < hist.cols(); ++c) {
      const std::uint64_t cell = hist.at(r, c);
      if (cell == 0) continue;
      const long double ratio =
          (static_cast<long double>(cell) * total) /
          (static_cast<long double>(m.rows[r]) * static_cast<long double>(m.cols[c]));
      acc += static_cast<long double>(cell) * std::log(ratio);
    }
  }
  const double value = static_cast<double>(acc / total);
  const double upper = std::min(entropy_of_counts(m.rows), entropy_of_counts(m.cols));
  return clamp_mi(value, upper);
}

double mutual_information_miller_madow(const JointHistogram& hist) {
  const double plug_in = mutual_information(hist);
  const Marginals m = marginals(hist);
  std::size_t joint_occupied = 0;
  for (std::size_t r = 0; r < hist.rows(); ++r) {
    for (std::size_t c = 0; c < hist.cols(); ++c) joint_occupied += hist.at(r, c) > 0;
  }
  const double correction =
      (static_cast<double>(joint_occupied) - static_cast<double>(occupied(m.rows)) -
       static_cast<double>(occupied(m.cols)) + 1.0) /
      (2.0 * static_cast<double>(hist.total()));
  return std::max(0.0, plug_in - correction);
}

double mutual_information(const Eigen::MatrixXd& joint) {
  check_distribution({joint.data(), static_cast<std::size_t>(joint.size())});
  const Eigen::VectorXd rows = joint.rowwise().sum();
  const Eigen::VectorXd cols = joint.colwise().sum().transpose();
  double acc = 0.0;
  for (Eigen::Index r = 0; r < joint.rows(); ++r) {
    for (Eigen::Index c = 0; c < joint.cols(); ++c) {
      const double p = joint(r, c);
      if (p > 0.0) acc += p * std::log(p / (rows(r) * cols(c)));
    }
  }
  const double upper =
      std::min(entropy_unchecked({rows.data(), static_cast<std::size_t>(rows.size())}),
               entropy_unchecked({cols.data(), static_cast<std::size_t>(cols.size())}));
  return clamp_mi(acc, upper);
}

ComplexityEstimate cdc_estimate(std::span<const NoisyTrial> trials,
                                std::span<const ClassIndex> clean_labels,
                                std::uint32_t k) {
  if (trials.empty()) throw ContractViolation("cdc_estimate: no trials");
  if (k < 2) throw ContractViolation("cdc_estimate: k must be >= 2");
  JointHistogram hist(k, k);
  for (const NoisyTrial& t : trials) {
    if (t.train_predictions.size() != clean_labels.size() ||
        t.noise_deviations.size() != clean_labels.size()) {
      throw ContractViolation("cdc_estimate: trial length differs from labels");
    }
    for (std::size_t i = 0; i < clean_labels.size(); ++i) {
      const std::uint32_t delta = (t.train_predictions[i] + k - clean_labels[i]) % k;
      hist.add(delta, t.noise_deviations[i]);
    }
  }
  ComplexityEstimate out;
  out.value = static_cast<double>(clean_labels.size()) * mutual_information(hist);
  out.sample_count = hist.total();
  return out;
}

ComplexityEstimate cpc_estimate(std::span<const NoisyTrial> trials,
                                std::span<const ClassIndex> clean_labels,
                                std::uint32_t k, bool miller_madow, unsigned threads) {
  if (trials.size() < 2) {
    throw InsufficientTrialsError("prediction complexity needs at least 2 trials, got " +
                                  std::to_string(trials.size()));
  }
  for (const NoisyTrial& t : trials) {
    if (t.train_predictions.size() != clean_labels.size() ||
        t.noise_deviations.size() != clean_labels.size()) {
      throw ContractViolation("cpc_estimate: trial length differs from labels");
    }
  }
  ComplexityEstimate out;
  out.estimator = miller_madow ? EstimatorKind::PlugInMillerMadow : EstimatorKind::PlugIn;
  out.per_index.assign(clean_labels.size(), 0.0);
  parallel_for(clean_labels.size(), threads, [&](std::size_t i) {
    JointHistogram hist(k, k);
    for (const NoisyTrial& t : trials) {
      const std::uint32_t noisy = (clean_labels[i] + t.noise_deviations[i]) % k;
      hist.add(t.train_predictions[i], noisy);
    }
    out.per_index[i] =
        miller_madow ? mutual_information_miller_madow(hist) : mutual_information(hist);
  });
  for (double v : out.per_index) out.value += v;
  out.sample_count = trials.size() * clean_labels.size();
  return out;
}

ComplexityEstimate average_complexity(std::span<const ComplexityEstimate> estimates) {
  if (estimates.empty()) throw ContractViolation("average of zero estimates");
  ComplexityEstimate out;
  out.estimator = estimates.front().estimator;
  for (const auto& e : estimates) {
    out.value += e.value;
    out.sample_count += e.sample_count;
  }
  out.value /= static_cast<double>(estimates.size());
  return out;
}

PinskerSides pinsker_gap_bound(const Eigen::Matrix2d& joint) {
  const double expect_b = joint(0, 1) + joint(1, 1);
  if (!(expect_b > 0.0)) throw ContractViolation("pinsker_gap_bound: E[B] must be > 0");
  const double expect_z = joint(1, 0) + joint(1, 1);
  const double z_given_b = joint(1, 1) / expect_b;
  PinskerSides out;
  out.mutual_information = mutual_information(Eigen::MatrixXd(joint));
  out.lhs = std::abs(expect_z - z_given_b);
  out.rhs = std::sqrt(out.mutual_information / 2.0) / expect_b;
  return out;
}

TripleDistribution::TripleDistribution(std::size_t w_size, std::size_t x_size,
                                       std::size_t y_size)
    : w_size_(w_size), x_size_(x_size), y_size_(y_size),
      p_(w_size * x_size * y_size, 0.0) {
  if (p_.empty()) throw ContractViolation("triple distribution needs non-empty alphabets");
}

Eigen::MatrixXd TripleDistribution::joint_w_xy() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w_size_, x_size_ * y_size_);
  for (std::size_t w = 0; w < w_size_; ++w)
    for (std::size_t x = 0; x < x_size_; ++x)
      for (std::size_t y = 0; y < y_size_; ++y) m(w, x * y_size_ + y) = (*this)(w, x, y);
  return m;
}

Eigen::MatrixXd TripleDistribution::joint_w_x() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w_size_, x_size_);
  for (std::size_t w = 0; w < w_size_; ++w)
    for (std::size_t x = 0; x < x_size_; ++x)
      for (std::size_t y = 0; y < y_size_; ++y) m(w, x) += (*this)(w, x, y);
  return m;
}

Eigen::MatrixXd TripleDistribution::joint_w_y() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w_size_, y_size_);
  for (std::size_t w = 0; w < w_size_; ++w)
    for (std::size_t x = 0; x < x_size_; ++x)
      for (std::size_t y = 0; y < y_size_; ++y) m(w, y) += (*this)(w, x, y);
  return m;
}

Eigen::MatrixXd TripleDistribution::joint_x_y() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(x_size_, y_size_);
  for (std::size_t w = 0; w < w_size_; ++w)
    for (std::size_t x = 0; x < x_size_; ++x)
      for (std::size_t y = 0; y < y_size_; ++y) m(x, y) += (*this)(w, x, y);
  return m;
}

bool mi_superadditivity_check(const TripleDistribution& dist) {
  const Eigen::MatrixXd xy = dist.joint_x_y();
  const Eigen::VectorXd px = xy.rowwise().sum();
  const Eigen::VectorXd py = xy.colwise().sum().transpose();
  for (Eigen::Index x = 0; x < xy.rows(); ++x) {
    for (Eigen::Index y = 0; y < xy.cols(); ++y) {
      if (std::abs(xy(x, y) - px(x) * py(y)) > 1e-12) {
        throw DependenceError("mi_superadditivity_check: X and Y are not independent");
      }
    }
  }
  const double joint = mutual_information(dist.joint_w_xy());
  const double with_x = mutual_information(dist.joint_w_x());
  const double with_y = mutual_information(dist.joint_w_y());
  return joint >= with_x + with_y - 1e-12;
}

}  // namespace rrm
