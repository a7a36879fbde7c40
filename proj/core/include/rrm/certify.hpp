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

// Deterministic certification suites over the information-theoretic lemmas
// and the ERM robustness bound. Each returns a summary; none throws on a
// violation.

#include <cstdint>
#include <string>

#include "rrm/bounds.hpp"
#include "rrm/core.hpp"

namespace rrm {

struct PinskerGridResult {
  std::size_t joints = 0;       // grid joints with E[B] >= min_eb
  std::size_t violations = 0;
  double worst_excess = 0.0;    // max(lhs - rhs) over the grid
  Eigen::Matrix2d worst_joint = Eigen::Matrix2d::Zero();
};

/// Every 2 x 2 joint whose entries are multiples of 1/steps (rows Z,
/// columns B) with E[B] >= min_eb; a violation is lhs > rhs + tolerance.
PinskerGridResult pinsker_grid(std::uint32_t steps = 100, double min_eb = 0.01,
                               double tolerance = 1e-12);

struct SuperadditivityResult {
  std::size_t joints = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max(I(W;X) + I(W;Y) - I(W;X,Y))
};

/// Random p(x) p(y) p(w | x, y) with alphabets of size 2..4.
TripleDistribution random_independent_triple(std::uint64_t seed);

SuperadditivityResult superadditivity_suite(std::size_t count, std::uint64_t seed);

/// n points evenly spaced in [0, 1) with label 1 from x >= 0.3 (class 2 of
/// the thresholds is realizable).
LabeledEmbeddings threshold_dataset(std::size_t n);

/// ERM over 1-D thresholds on threshold_dataset(n) under UniformAll noise.
ErmRobustness erm_suite(std::size_t n, double eta, std::uint32_t trials, std::uint64_t seed,
                        unsigned threads = 1);

}  // namespace rrm
