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

#include "rrm/classifier.hpp"

#include <bit>

#include "rrm/rng.hpp"

namespace rrm {

std::vector<ClassIndex> Classifier::predict_rows(const FeatureMatrix& rows) const {
  std::vector<ClassIndex> out(static_cast<std::size_t>(rows.rows()));
  const auto d = static_cast<std::size_t>(rows.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = predict({rows.data() + i * d, d});
  }
  return out;
}

ClassIndex argmax_smallest(std::span<const double> scores) {
  if (scores.empty()) throw ContractViolation("argmax of empty score vector");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return static_cast<ClassIndex>(best);
}

std::uint64_t hash_row(std::span<const double> row, std::uint64_t salt) {
  std::uint64_t h = mix64(salt ^ row.size());
  for (double v : row) {
    // +0.0 and -0.0 compare equal and must hash equal.
    const double canonical = v == 0.0 ? 0.0 : v;
    h = mix64(h ^ std::bit_cast<std::uint64_t>(canonical)) + kGoldenGamma;
  }
  return h;
}

}  // namespace rrm
