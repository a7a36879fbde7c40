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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rrm/infotheory.hpp"
#include "rrm/noise.hpp"
#include "rrm/rng.hpp"
#include "rrm/trainers.hpp"

namespace rrm {
namespace {

LabeledEmbeddings distinct_rows(std::size_t n, std::uint32_t k) {
  FeatureMatrix x(static_cast<Eigen::Index>(n), 1);
  std::vector<ClassIndex> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
    y[i] = static_cast<ClassIndex>(i % k);
  }
  return {std::move(x), std::move(y), k};
}

testing::Table as_table(const JointHistogram& h) {
  testing::Table t(h.rows(), std::vector<double>(h.cols()));
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) t[r][c] = static_cast<double>(h.at(r, c));
  }
  return t;
}

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), std::log(4.0), 1e-15);
  EXPECT_THROW(entropy(std::vector<double>{0.5, 0.6}), ContractViolation);
  EXPECT_THROW(entropy(std::vector<double>{1.5, -0.5}), ContractViolation);
  const std::vector<std::uint64_t> counts{3, 1};
  EXPECT_NEAR(entropy_of_counts(counts), testing::ref_entropy({3, 1}), 1e-15);
}

TEST(MutualInformation, ProductJointIsZero) {
  JointHistogram h(3, 2);
  const std::uint64_t rows[] = {1, 2, 3};
  const std::uint64_t cols[] = {4, 5};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) h.add(r, c, rows[r] * cols[c]);
  }
  EXPECT_LE(mutual_information(h), 1e-12);
}

TEST(MutualInformation, DiagonalIsLn2) {
  JointHistogram h(2, 2);
  h.add(0, 0, 50);
  h.add(1, 1, 50);
  EXPECT_NEAR(mutual_information(h), std::log(2.0), 1e-15);
}

TEST(MutualInformation, FourTermFormula) {
  JointHistogram h(2, 2);
  h.add(0, 0, 400000);
  h.add(0, 1, 100000);
  h.add(1, 0, 100000);
  h.add(1, 1, 400000);
  const double direct = 2 * 0.4 * std::log(0.4 / 0.25) + 2 * 0.1 * std::log(0.1 / 0.25);
  EXPECT_NEAR(mutual_information(h), direct, 1e-4);
  EXPECT_NEAR(mutual_information(h), direct, 1e-12);
}

TEST(MutualInformation, RandomHistogramsAgreeWithEntropyIdentity) {
  Rng rng(4);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t a = 1 + rng.uniform_index(5), b = 1 + rng.uniform_index(5);
    JointHistogram h(a, b);
    for (int s = 0; s < 50; ++s) h.add(rng.uniform_index(a), rng.uniform_index(b), 1 + rng.uniform_index(3));
    const double i = mutual_information(h);
    ASSERT_NEAR(i, testing::ref_mi(as_table(h)), 1e-12);
    ASSERT_NEAR(i, mutual_information(h.transposed()), 1e-12);
    ASSERT_GE(i, 0.0);
    std::vector<double> rows(a, 0), cols(b, 0);
    for (std::size_t r = 0; r < a; ++r)
      for (std::size_t c = 0; c < b; ++c) {
        rows[r] += static_cast<double>(h.at(r, c));
        cols[c] += static_cast<double>(h.at(r, c));
      }
    ASSERT_LE(i, std::min(testing::ref_entropy(rows), testing::ref_entropy(cols)) + 1e-12);
  }
}

TEST(MutualInformation, MillerMadowSubtractsCellCorrection) {
  JointHistogram h(2, 2);
  h.add(0, 0, 30);
  h.add(0, 1, 20);
  h.add(1, 0, 10);
  h.add(1, 1, 40);
  const double expected = std::max(0.0, mutual_information(h) - (4.0 - 2 - 2 + 1) / 200.0);
  EXPECT_NEAR(mutual_information_miller_madow(h), expected, 1e-15);
}

TEST(MutualInformation, ExactTable) {
  Eigen::MatrixXd joint(2, 2);
  joint << 0.4, 0.1, 0.1, 0.4;
  EXPECT_NEAR(mutual_information(joint), testing::ref_mi({{0.4, 0.1}, {0.1, 0.4}}), 1e-15);
}

// 2 N I is asymptotically chi-square with (k-1)^2 degrees of freedom under
// independence, so the mean of I over repetitions sits at (k-1)^2 / (2 N).
TEST(Cdc, ConstantTrainerOnlyPlugInBias) {
  const auto data = distinct_rows(200, 3);
  const int reps = 50;
  double mean = 0;
  std::uint64_t samples = 0;
  for (int r = 0; r < reps; ++r) {
    const auto trials = run_noisy_trials(constant_trainer(0), data, {NoiseVariant::UniformAll, 0.2}, 20,
                                         static_cast<std::uint64_t>(r));
    const auto est = cdc_estimate(trials, data.labels(), 3);
    EXPECT_EQ(est.estimator, EstimatorKind::PlugIn);
    samples = est.sample_count;
    mean += est.value / 200.0 / reps;
  }
  EXPECT_EQ(samples, 4000u);
  const double n = static_cast<double>(samples);
  const double bias = 4.0 / (2.0 * n);
  const double se = std::sqrt(2.0 * 4.0) / (2.0 * n) / std::sqrt(double(reps));
  EXPECT_LE(mean, bias + 3 * se);
}

TEST(Cdc, InterpolatorEqualsNTimesEntropyOfN) {
  const auto data = distinct_rows(100, 3);
  const auto trials = run_noisy_trials(interpolating_trainer(), data, {NoiseVariant::UniformOther, 0.2}, 20, 2);
  std::vector<double> counts(3, 0.0);
  for (const auto& t : trials)
    for (auto d : t.noise_deviations) counts[d] += 1;
  EXPECT_NEAR(cdc_estimate(trials, data.labels(), 3).value, 100.0 * testing::ref_entropy(counts), 1e-10);
}

TEST(Cpc, NeedsTwoTrials) {
  const auto data = distinct_rows(10, 2);
  const auto trials = run_noisy_trials(constant_trainer(0), data, {NoiseVariant::UniformAll, 0.2}, 1, 1);
  EXPECT_THROW(cpc_estimate(trials, data.labels(), 2), InsufficientTrialsError);
}

TEST(Cpc, InterpolatorSumsLabelEntropies) {
  const auto data = distinct_rows(30, 2);
  const auto trials = run_noisy_trials(interpolating_trainer(), data, {NoiseVariant::UniformOther, 0.3}, 40, 3);
  double expected = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> counts(2, 0.0);
    for (const auto& t : trials) counts[(data.labels()[i] + t.noise_deviations[i]) % 2] += 1;
    expected += testing::ref_entropy(counts);
  }
  const auto est = cpc_estimate(trials, data.labels(), 2);
  EXPECT_NEAR(est.value, expected, 1e-10);
  EXPECT_EQ(est.per_index.size(), 30u);
}

TEST(Cpc, ConstantTrainerMillerMadowNearZero) {
  const auto data = distinct_rows(50, 3);
  const std::uint32_t K = 40;
  const auto trials = run_noisy_trials(constant_trainer(2), data, {NoiseVariant::UniformAll, 0.5}, K, 3);
  const auto est = cpc_estimate(trials, data.labels(), 3, true);
  EXPECT_EQ(est.estimator, EstimatorKind::PlugInMillerMadow);
  EXPECT_LE(std::abs(est.value / 50.0), 4.0 / (2.0 * K));
}

TEST(Cpc, ThreadCountDoesNotChangeResult) {
  const auto data = distinct_rows(64, 3);
  const auto trials = run_noisy_trials(interpolating_trainer(), data, {NoiseVariant::UniformAll, 0.3}, 10, 3);
  const auto a = cpc_estimate(trials, data.labels(), 3, false, 1);
  const auto b = cpc_estimate(trials, data.labels(), 3, false, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.per_index, b.per_index);
}

TEST(AverageComplexity, MeanOfValues) {
  std::vector<ComplexityEstimate> v(2);
  v[0].value = 1.0;
  v[1].value = 3.0;
  EXPECT_DOUBLE_EQ(average_complexity(v).value, 2.0);
}

TEST(Pinsker, IndependentJointIsZero) {
  Eigen::Matrix2d joint;
  joint << 0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4;
  const auto s = pinsker_gap_bound(joint);
  EXPECT_NEAR(s.lhs, 0.0, 1e-15);
  EXPECT_NEAR(s.rhs, 0.0, 1e-7);
}

TEST(Pinsker, WorkedExample) {
  Eigen::Matrix2d joint;
  joint << 0.4, 0.1, 0.1, 0.4;
  const auto s = pinsker_gap_bound(joint);
  const double i = 2 * 0.4 * std::log(0.4 / 0.25) + 2 * 0.1 * std::log(0.1 / 0.25);
  EXPECT_NEAR(s.lhs, 0.3, 1e-15);
  EXPECT_NEAR(s.rhs, std::sqrt(i / 2) / 0.5, 1e-14);
  EXPECT_LE(s.lhs, s.rhs);
  Eigen::Matrix2d no_b;
  no_b << 0.5, 0.0, 0.5, 0.0;
  EXPECT_THROW(pinsker_gap_bound(no_b), ContractViolation);
}

TEST(Superadditivity, EqualityWhenWIsThePair) {
  TripleDistribution d(4, 2, 2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) d(2 * x + y, x, y) = 0.25;
  EXPECT_NEAR(mutual_information(d.joint_w_xy()), 2 * std::log(2.0), 1e-15);
  EXPECT_NEAR(mutual_information(d.joint_w_x()) + mutual_information(d.joint_w_y()), 2 * std::log(2.0), 1e-15);
  EXPECT_TRUE(mi_superadditivity_check(d));
}

TEST(Superadditivity, ConstantW) {
  TripleDistribution d(1, 2, 3);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 3; ++y) d(0, x, y) = 1.0 / 6.0;
  EXPECT_TRUE(mi_superadditivity_check(d));
  EXPECT_NEAR(mutual_information(d.joint_w_xy()), 0.0, 1e-15);
}

TEST(Superadditivity, RejectsDependentXY) {
  TripleDistribution d(2, 2, 2);
  d(0, 0, 0) = 0.5;
  d(1, 1, 1) = 0.5;
  EXPECT_THROW(mi_superadditivity_check(d), DependenceError);
}

}  // namespace
}  // namespace rrm
