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
#include "rrm/bounds.hpp"
#include "rrm/oracle.hpp"
#include "rrm/rng.hpp"

namespace rrm {
namespace {

ExactScenario scenario(std::vector<double> xs, std::vector<ClassIndex> ys, std::uint32_t k,
                       OracleTrainerKind kind, RationalEta eta) {
  FeatureMatrix x(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = xs[i];
  ExactScenario s{LabeledEmbeddings(std::move(x), std::move(ys), k)};
  s.trainer_kind = kind;
  s.eta = eta;
  s.noise = NoiseVariant::UniformOther;
  return s;
}

void expect_matches_reference(const ExactQuantities& q, const testing::RefExact& ref) {
  EXPECT_NEAR(static_cast<double>(ref.mass), 1.0, 1e-15);
  EXPECT_NEAR(q.train_eta, static_cast<double>(ref.train_eta), 1e-14);
  ASSERT_TRUE(q.ntrain_eta.has_value());
  EXPECT_NEAR(*q.ntrain_eta, static_cast<double>(ref.ntrain_eta), 1e-14);
  EXPECT_NEAR(q.flip_probability, static_cast<double>(ref.flip_probability), 1e-14);
  EXPECT_NEAR(q.cdc, ref.cdc, 1e-12);
  EXPECT_NEAR(q.cpc, ref.cpc, 1e-12);
  EXPECT_NEAR(q.cmdl, ref.cmdl, 1e-12);
  EXPECT_NEAR(q.memorization_gap, ref.memorization_gap, 1e-14);
}

TEST(Oracle, ConstantTrainerHasNoComplexity) {
  auto s = scenario({0, 1, 2, 3}, {0, 1, 1, 0}, 2, OracleTrainerKind::Constant, {1, 5});
  s.constant_value = 1;
  const auto q = enumerate(s);
  EXPECT_EQ(q.patterns, 16u);
  EXPECT_EQ(q.cmdl, 0.0);
  EXPECT_NEAR(q.cdc, 0.0, 1e-15);
  EXPECT_NEAR(q.cpc, 0.0, 1e-15);
  EXPECT_EQ(q.memorization_gap, 0.0);
  EXPECT_EQ(q.train_eta_exact, ExactRational(1, 2));
}

TEST(Oracle, InterpolatorTwoPoints) {
  const auto s = scenario({0, 1}, {0, 1}, 2, OracleTrainerKind::Interpolator, {1, 10});
  const auto q = enumerate(s);
  const double hb = testing::binary_entropy(0.1);
  EXPECT_NEAR(hb, 0.3251, 1e-4);
  EXPECT_NEAR(q.cmdl, 2 * hb, 1e-12);
  EXPECT_NEAR(q.cpc, 2 * hb, 1e-12);
  EXPECT_NEAR(q.cdc, 2 * hb, 1e-12);
  EXPECT_EQ(q.ntrain_eta_exact, ExactRational(0));
  EXPECT_EQ(q.train_eta_exact, ExactRational(9, 10));
  // Train(eta) = 1 - eta and NTrain(eta) = 0.
  EXPECT_NEAR(q.memorization_gap, 0.9, 1e-15);
  EXPECT_NEAR(q.thm2_rhs, std::sqrt(2 * hb / 4) / 0.1, 1e-12);
  EXPECT_NEAR(q.thm2_rhs, 4.03, 0.01);
  EXPECT_LE(1.0, q.thm2_rhs);
}

TEST(Oracle, MajorityMatchesIndependentEnumerator) {
  const std::vector<ClassIndex> y{0, 1, 1, 0, 1};
  const auto s = scenario({0, 1, 2, 3, 4}, y, 2, OracleTrainerKind::Majority, {1, 5});
  const auto q = enumerate(s);
  EXPECT_EQ(q.patterns, 32u);
  const auto ref = testing::ref_enumerate(
      y, 2, 1, 5,
      [](const std::vector<std::uint32_t>& noisy) {
        return std::vector<std::uint32_t>(noisy.size(), testing::ref_majority(noisy, 2));
      },
      [](const std::vector<std::uint32_t>& noisy) {
        return std::vector<std::uint32_t>{testing::ref_majority(noisy, 2)};
      });
  expect_matches_reference(q, ref);
}

TEST(Oracle, InterpolatorAndMajorityAgreeWithReferenceOnRandomScenarios) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 30; ++seed) {
    ExactScenario s = random_scenario(seed);
    if (s.trainer_kind == OracleTrainerKind::ThresholdErm ||
        s.trainer_kind == OracleTrainerKind::Constant)
      continue;
    std::vector<double> xs(s.train.features().data(), s.train.features().data() + s.train.size());
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) continue;  // need distinct rows
    const std::uint32_t k = s.train.num_classes();
    const auto q = enumerate(s);
    testing::RefExact ref;
    if (s.trainer_kind == OracleTrainerKind::Majority) {
      auto maj = [k](const std::vector<std::uint32_t>& noisy) {
        return std::vector<std::uint32_t>(noisy.size(), testing::ref_majority(noisy, k));
      };
      ref = testing::ref_enumerate(s.train.labels(), k, s.eta.num, s.eta.den, maj, maj);
    } else {
      auto id = [](const std::vector<std::uint32_t>& noisy) { return noisy; };
      ref = testing::ref_enumerate(s.train.labels(), k, s.eta.num, s.eta.den, id, id);
    }
    expect_matches_reference(q, ref);
    ++checked;
  }
}

TEST(Oracle, InterpolatorChainEqualities) {
  const auto s = scenario({0, 1, 2}, {0, 2, 1}, 3, OracleTrainerKind::Interpolator, {1, 4});
  const auto q = enumerate(s);
  const double hn = testing::ref_entropy({0.75, 0.125, 0.125});
  EXPECT_NEAR(q.cdc, 3 * hn, 1e-12);
  EXPECT_NEAR(q.cpc, 3 * hn, 1e-12);
  EXPECT_NEAR(q.cmdl, 3 * hn, 1e-12);
}

TEST(Oracle, ProbabilitiesSumToOne) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto q = enumerate(random_scenario(seed));
    ASSERT_NEAR(q.probability_mass, 1.0, 1e-12);
  }
}

TEST(Oracle, ChainAndMemorizationBoundHoldOnRandomScenarios) {
  for (std::uint64_t seed = 100; seed < 300; ++seed) {
    const auto s = random_scenario(seed);
    const auto q = enumerate(s);
    ASSERT_LE(q.cdc, q.cpc + 1e-12) << seed;
    ASSERT_LE(q.cpc, q.cmdl + 1e-12) << seed;
    ASSERT_LE(q.memorization_gap, q.thm2_rhs + 1e-12) << seed;
    // Under UniformOther the exact flip probability is eta itself.
    ASSERT_NEAR(q.flip_probability, s.eta.value(), 1e-15);
    ASSERT_LE(q.cmdl, q.prediction_entropy + 1e-12);
  }
}

TEST(Oracle, CertifyChainPasses) {
  const auto cert = certify_chain(100, 1);
  EXPECT_EQ(cert.scenarios, 100u);
  EXPECT_TRUE(cert.passed());
  EXPECT_THROW(certify_chain(0, 1), ContractViolation);
}

TEST(Oracle, RandomScenariosRespectLimits) {
  ChainOptions options;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_scenario(seed, options);
    ASSERT_LE(s.train.size(), 6u);
    ASSERT_LE(s.train.num_classes(), 3u);
    ASSERT_EQ(s.noise, NoiseVariant::UniformOther);
    ASSERT_LT(s.constant_value, s.train.num_classes());
  }
}

TEST(Oracle, EnumerationLimits) {
  std::vector<double> xs(11);
  std::vector<ClassIndex> ys(11, 0);
  EXPECT_THROW(enumerate(scenario(xs, ys, 2, OracleTrainerKind::Majority, {1, 10})), EnumerationLimitError);
  EXPECT_THROW(enumerate(scenario({0, 1}, {0, 3}, 4, OracleTrainerKind::Majority, {1, 10})),
               EnumerationLimitError);
  EXPECT_THROW(enumerate(scenario({0, 1}, {0, 1}, 2, OracleTrainerKind::Majority, {0, 10})),
               ContractViolation);
  std::vector<double> ten(10);
  std::vector<ClassIndex> tens(10, 0);
  EXPECT_EQ(enumerate(scenario(ten, tens, 3, OracleTrainerKind::Constant, {1, 10})).patterns, 59049u);
}

TEST(Oracle, ExactMatchesMonteCarloForSmallScenario) {
  const std::vector<ClassIndex> y{0, 1, 1, 0};
  const auto s = scenario({0, 1, 2, 3}, y, 2, OracleTrainerKind::ThresholdErm, {1, 5});
  const auto q = enumerate(s);
  const auto trials = run_noisy_trials(s.trainer(), s.train, s.noise_model(), 50000, 3);
  const auto acc = noisy_accuracies(trials, y);
  const double n = static_cast<double>(acc.total_samples);
  EXPECT_NEAR(acc.train_noisy, q.train_eta, 3 * std::sqrt(q.train_eta * (1 - q.train_eta) / n));
  const double m = static_cast<double>(acc.corrupted_samples);
  EXPECT_NEAR(*acc.ntrain_noisy, *q.ntrain_eta, 3 * std::sqrt(*q.ntrain_eta * (1 - *q.ntrain_eta) / m) + 1e-12);
}

TEST(Oracle, TrainerNamesRoundTrip) {
  for (auto kind : {OracleTrainerKind::Constant, OracleTrainerKind::Majority,
                    OracleTrainerKind::Interpolator, OracleTrainerKind::ThresholdErm}) {
    EXPECT_EQ(parse_oracle_trainer(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_oracle_trainer("mlp"), ContractViolation);
}

}  // namespace
}  // namespace rrm
