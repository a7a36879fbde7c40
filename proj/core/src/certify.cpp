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

#include "rrm/certify.hpp"

#include <algorithm>

#include "rrm/infotheory.hpp"
#include "rrm/rng.hpp"
#include "rrm/trainers.hpp"

namespace rrm {

PinskerGridResult pinsker_grid(std::uint32_t steps, double min_eb, double tolerance) {
  if (steps < 1) throw ContractViolation("pinsker_grid: steps must be >= 1");
  PinskerGridResult result;
  result.worst_excess = -1.0;
  const double unit = 1.0 / steps;
  // a = p(Z=0,B=0), b = p(Z=0,B=1), c = p(Z=1,B=0), d = p(Z=1,B=1).
  for (std::uint32_t a = 0; a <= steps; ++a) {
    for (std::uint32_t b = 0; a + b <= steps; ++b) {
      for (std::uint32_t c = 0; a + b + c <= steps; ++c) {
        const std::uint32_t d = steps - a - b - c;
        if (static_cast<double>(b + d) * unit < min_eb - 1e-15) continue;
        Eigen::Matrix2d joint;
        joint << a * unit, b * unit, c * unit, d * unit;
        const PinskerSides sides = pinsker_gap_bound(joint);
        ++result.joints;
        const double excess = sides.lhs - sides.rhs;
        if (excess > tolerance) ++result.violations;
        if (excess > result.worst_excess) {
          result.worst_excess = excess;
          result.worst_joint = joint;
        }
      }
    }
  }
  return result;
}

TripleDistribution random_independent_triple(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t w = 2 + rng.uniform_index(3);
  const std::size_t x = 2 + rng.uniform_index(3);
  const std::size_t y = 2 + rng.uniform_index(3);
  auto simplex = [&](std::size_t size) {
    std::vector<double> p(size);
    double total = 0.0;
    for (double& v : p) total += (v = rng.uniform01() + 1e-3);
    for (double& v : p) v /= total;
    return p;
  };
  const std::vector<double> px = simplex(x);
  const std::vector<double> py = simplex(y);
  TripleDistribution dist(w, x, y);
  for (std::size_t i = 0; i < x; ++i) {
    for (std::size_t j = 0; j < y; ++j) {
      const std::vector<double> pw = simplex(w);
      for (std::size_t v = 0; v < w; ++v) dist(v, i, j) = px[i] * py[j] * pw[v];
    }
  }
  return dist;
}

SuperadditivityResult superadditivity_suite(std::size_t count, std::uint64_t seed) {
  SuperadditivityResult result;
  result.worst_excess = -1.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const TripleDistribution dist = random_independent_triple(derive_seed(seed, idx));
    ++result.joints;
    const double excess = mutual_information(dist.joint_w_x()) +
                          mutual_information(dist.joint_w_y()) -
                          mutual_information(dist.joint_w_xy());
    result.worst_excess = std::max(result.worst_excess, excess);
    if (!mi_superadditivity_check(dist)) ++result.violations;
  }
  return result;
}

LabeledEmbeddings threshold_dataset(std::size_t n) {
  if (n < 2) throw ContractViolation("threshold_dataset: n must be >= 2");
  FeatureMatrix x(static_cast<Eigen::Index>(n), 1);
  std::vector<ClassIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(i) / static_cast<double>(n);
    x(static_cast<Eigen::Index>(i), 0) = v;
    labels[i] = v >= 0.3 ? 1 : 0;
  }
  return {std::move(x), std::move(labels), 2};
}

ErmRobustness erm_suite(std::size_t n, double eta, std::uint32_t trials, std::uint64_t seed,
                        unsigned threads) {
  const LabeledEmbeddings data = threshold_dataset(n);
  return erm_robustness_check(data, threshold_class(data, 0),
                              NoiseModel{NoiseVariant::UniformAll, eta}, trials, seed, threads);
}

}  // namespace rrm
