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

#include <benchmark/benchmark.h>

#include "rrm/bounds.hpp"
#include "rrm/datagen.hpp"
#include "rrm/infotheory.hpp"
#include "rrm/noise.hpp"
#include "rrm/oracle.hpp"
#include "rrm/rng.hpp"
#include "rrm/trainers.hpp"

namespace {

using namespace rrm;

void BM_RidgeFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::uint32_t>(state.range(1));
  const auto split = synth({GaussianClusters{10, d, 2.0}, n, 10, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(ridge_fit(split.train, split.train.labels(), {}));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_RidgeFit)->Args({1000, 64})->Args({10000, 128})->Args({10000, 512})
    ->Unit(benchmark::kMillisecond);

void BM_MutualInformation(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  JointHistogram hist(k, k);
  for (int i = 0; i < 100000; ++i) hist.add(rng.uniform_index(k), rng.uniform_index(k));
  for (auto _ : state) benchmark::DoNotOptimize(mutual_information(hist));
}
BENCHMARK(BM_MutualInformation)->Arg(2)->Arg(10)->Arg(100);

void BM_CdcEstimate(benchmark::State& state) {
  const auto split = synth({GaussianClusters{10, 32, 2.0}, 5000, 10, 3});
  const auto trials = run_noisy_trials(ridge_trainer(), split.train,
                                       {NoiseVariant::UniformAll, 0.05}, 20, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdc_estimate(trials, split.train.labels(), 10));
  }
}
BENCHMARK(BM_CdcEstimate)->Unit(benchmark::kMillisecond);

void BM_CorruptLabels(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<ClassIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<ClassIndex>(i % 10);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        corrupt_labels(labels, 10, {NoiseVariant::UniformAll, 0.05}, ++seed));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_CorruptLabels)->Arg(1000)->Arg(100000);

void BM_Enumerate(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  FeatureMatrix x(n, 1);
  std::vector<ClassIndex> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[static_cast<std::size_t>(i)] = static_cast<ClassIndex>(i % 3);
  }
  ExactScenario scenario{LabeledEmbeddings(x, y, 3), OracleTrainerKind::Majority};
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(scenario));
}
BENCHMARK(BM_Enumerate)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
