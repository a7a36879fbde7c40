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

// Synthetic representation datasets and augmentation expansion.

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "rrm/core.hpp"

namespace rrm {

/// Isotropic unit-variance Gaussians, one per class. With d >= k the class
/// means are separation/sqrt(2) * e_c (pairwise distance = separation);
/// otherwise they sit at c * separation along the first axis.
struct GaussianClusters {
  std::uint32_t k = 2;
  std::uint32_t d = 16;
  double separation = 10.0;  // in units of sigma; 0 gives indistinguishable classes
};

/// Well-separated Gaussian clusters meant for the trivial-representation
/// trainer; `target_gap` is the rationality gap the fixture is built for.
/// The mask fraction to pair it with is mask_fraction_for_gap(target_gap, k).
struct TrivialRepFixture {
  double target_gap = 0.2;
  std::uint32_t k = 2;
  std::uint32_t d = 8;
  double separation = 10.0;
};

/// A k = 2 dataset with an exact least-squares margin profile: each entry
/// (gamma, fraction) becomes blocks of identical one-hot rows whose label
/// split makes the unregularized, bias-free fit's margin exactly gamma.
struct MarginFixture {
  std::vector<std::pair<double, double>> profile{{1.0, 1.0}};
};

using SynthPreset = std::variant<GaussianClusters, TrivialRepFixture, MarginFixture>;

struct SynthSpec {
  SynthPreset preset = GaussianClusters{};
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitDataset {
  LabeledEmbeddings train;
  LabeledEmbeddings test;
};

/// Deterministic in the spec (including seed). Labels are balanced
/// round-robin (row i has class i mod k) for the Gaussian presets.
SplitDataset synth(const SynthSpec& spec);

/// Block size m and majority count a with (2a - m) / m == gamma, for the
/// smallest m <= 1000; throws when gamma has no such representation.
std::pair<std::size_t, std::size_t> margin_block(double gamma);

/// t copies of every row, each jittered by i.i.d. N(0, jitter^2) per
/// coordinate. Copy j of row i lands at row i*t + j with the clean label
/// and group id i (or the existing group id of row i).
LabeledEmbeddings augment(const LabeledEmbeddings& data, std::uint32_t copies,
                          double jitter, std::uint64_t seed);

}  // namespace rrm
