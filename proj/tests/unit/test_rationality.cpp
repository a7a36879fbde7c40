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

#include "rrm/datagen.hpp"
#include "rrm/rationality.hpp"
#include "rrm/trainers.hpp"

namespace rrm {
namespace {

TEST(ProcedureS, LabelIndependentTrainerIsUnchanged) {
  const auto split = synth({GaussianClusters{3, 4, 2.0}, 30, 20, 1});
  PotlConfig config;
  config.trials_per_test_point = 3;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    ASSERT_EQ(procedure_s_predict(constant_trainer(2), split.train, split.test.row(i), config, i), 2u);
  }
}

TEST(ProcedureS, SinglePointTrainSetReturnsTheRandomLabel) {
  FeatureMatrix x(1, 1);
  x << 5.0;
  const LabeledEmbeddings one(x, {0}, 3);
  std::vector<int> counts(3, 0);
  const int draws = 3000;
  for (int s = 0; s < draws; ++s) {
    ++counts[procedure_s_predict(majority_trainer(), one, std::vector<double>{1.0}, {}, static_cast<std::uint64_t>(s))];
  }
  const double sigma = std::sqrt(draws * (1.0 / 3) * (2.0 / 3));
  for (int c : counts) EXPECT_NEAR(c, draws / 3.0, 4 * sigma);
}

TEST(ProcedureS, Deterministic) {
  const auto split = synth({GaussianClusters{2, 4, 1.0}, 60, 40, 2});
  PotlConfig config;
  config.seed = 17;
  const auto a = potl_experiment(ridge_trainer(), split.train, split.test, config, 5);
  const auto b = potl_experiment(ridge_trainer(), split.train, split.test, config, 5);
  EXPECT_EQ(a.test_s, b.test_s);
  config.threads = 3;
  EXPECT_EQ(potl_experiment(ridge_trainer(), split.train, split.test, config, 5).test_s, a.test_s);
}

TEST(ProcedureS, NoGainWithoutRationalityGap) {
  const auto split = synth({GaussianClusters{2, 16, 10.0}, 200, 300, 3});
  PotlConfig config;
  config.seed = 4;
  const auto r = potl_experiment(ridge_trainer(), split.train, split.test, config, 10);
  EXPECT_NEAR(r.test_s, r.test_t, 3 * r.test_s_sigma + 1.0 / 300);
  EXPECT_TRUE(r.assumption_holds);
}

TEST(ProcedureS, InterpolatorCaseSplit) {
  // Unseen test points keep the inserted label: Test_S = 1/2 NTrain(eta)
  // (wrong insert, = 0 here) + 1/2 (right insert).
  const auto split = synth({GaussianClusters{2, 4, 3.0}, 100, 400, 5});
  PotlConfig config;
  config.seed = 8;
  const auto r = potl_experiment(interpolating_trainer(), split.train, split.test, config, 10);
  ASSERT_TRUE(r.ntrain_noisy.has_value());
  EXPECT_EQ(*r.ntrain_noisy, 0.0);
  const double expected = 0.5 * *r.ntrain_noisy + 0.5 * 1.0;
  EXPECT_NEAR(r.test_s, expected, 3 * std::sqrt(0.25 / 400));
}

TEST(ProcedureS, TrivialRepresentationRecoversTheGap) {
  const auto split = synth({TrivialRepFixture{0.2, 2, 8, 10.0}, 200, 500, 6});
  PotlConfig config;
  config.seed = 9;
  const auto trainer = trivial_representation_trainer(ridge_trainer(), mask_fraction_for_gap(0.2, 2));
  const auto r = potl_experiment(trainer, split.train, split.test, config, 20);
  ASSERT_TRUE(r.ntrain_noisy.has_value());
  EXPECT_GE(r.test_s, *r.ntrain_noisy - (0.02 + 3 * r.test_s_sigma));
  EXPECT_GE(r.gain, 0.15);
  ASSERT_TRUE(r.margin.has_value());
  EXPECT_NEAR(*r.margin, r.test_s - *r.ntrain_noisy, 1e-15);
  ASSERT_TRUE(r.informal_rhs.has_value());
}

TEST(TrivialRepresentation, MasksOnlyUnseenRows) {
  const auto split = synth({TrivialRepFixture{0.3, 2, 8, 10.0}, 300, 4000, 7});
  const double f = mask_fraction_for_gap(0.3, 2);
  EXPECT_NEAR(f, 0.6, 1e-15);
  const auto model = trivial_representation_trainer(ridge_trainer(), f)(split.train, split.train.labels(), 0);
  EXPECT_EQ(model->predict_rows(split.train.features()), split.train.labels());
  const double acc = accuracy(model->predict_rows(split.test.features()), split.test.labels());
  // Unmasked points are classified correctly, masked ones all get the zero
  // vector's class: expected accuracy 1 - f/2 for balanced k = 2.
  EXPECT_NEAR(acc, 1.0 - f / 2, 4 * std::sqrt(0.25 / 4000));
  EXPECT_THROW(mask_fraction_for_gap(0.6, 2), ContractViolation);
}

TEST(NoiseDetecting, SwitchesOnCorruption) {
  const auto split = synth({GaussianClusters{2, 4, 10.0}, 50, 10, 2});
  const auto trainer = noise_detecting_trainer(ridge_trainer(), split.train.labels());
  const auto clean = trainer(split.train, split.train.labels(), 0);
  EXPECT_EQ(clean->predict_rows(split.train.features()), split.train.labels());
  auto noisy = split.train.labels();
  noisy[0] = 1 - noisy[0];
  const auto other = trainer(split.train, noisy, 0);
  for (auto p : other->predict_rows(split.train.features())) EXPECT_EQ(p, 0u);
}

TEST(PotlConfig, Validation) {
  PotlConfig config;
  config.trials_per_test_point = 0;
  EXPECT_THROW(config.validate(), ContractViolation);
}

}  // namespace
}  // namespace rrm
