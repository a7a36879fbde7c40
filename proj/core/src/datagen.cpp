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

#include "rrm/datagen.hpp"

#include <cmath>
#include <sstream>

#include "rrm/rng.hpp"

namespace rrm {

namespace {

LabeledEmbeddings gaussian_split(std::uint32_t k, std::uint32_t d, double separation,
                                 std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix x(static_cast<Eigen::Index>(n), d);
  std::vector<ClassIndex> labels(n);
  const bool orthogonal = d >= k;
  const double offset = separation / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<ClassIndex>(i % k);
    labels[i] = c;
    for (std::uint32_t j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), j) = rng.normal();
    }
    if (orthogonal) {
      x(static_cast<Eigen::Index>(i), c) += offset;
    } else {
      x(static_cast<Eigen::Index>(i), 0) += static_cast<double>(c) * separation;
    }
  }
  return {std::move(x), std::move(labels), k};
}

LabeledEmbeddings margin_dataset(const MarginFixture& fixture, std::size_t n) {
  struct Block {
    std::size_t size;
    std::size_t majority;
  };
  std::vector<Block> blocks;
  for (const auto& [gamma, fraction] : fixture.profile) {
    const auto [m, a] = margin_block(gamma);
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n) /
                                                 static_cast<double>(m))));
    for (std::size_t b = 0; b < count; ++b) blocks.push_back({m, a});
  }
  std::size_t rows = 0;
  for (const auto& b : blocks) rows += b.size;

  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(rows),
                                        static_cast<Eigen::Index>(blocks.size()));
  std::vector<ClassIndex> labels(rows);
  std::size_t row = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto majority_class = static_cast<ClassIndex>(b % 2);
    for (std::size_t j = 0; j < blocks[b].size; ++j, ++row) {
      x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(b)) = 1.0;
      labels[row] = j < blocks[b].majority ? majority_class : 1 - majority_class;
    }
  }
  return {std::move(x), std::move(labels), 2};
}

}  // namespace

void SynthSpec::validate() const {
  if (n_train < 1 || n_test < 1) throw ContractViolation("synth: n_train and n_test must be >= 1");
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GaussianClusters> ||
                      std::is_same_v<P, TrivialRepFixture>) {
          if (p.k < 2) throw ContractViolation("synth: k must be >= 2");
          if (p.d < 1) throw ContractViolation("synth: d must be >= 1");
          if (!(p.separation >= 0.0)) throw ContractViolation("synth: separation must be >= 0");
          if (n_train < p.k || n_test < p.k) {
            throw ContractViolation("synth: need at least one sample per class");
          }
        }
        if constexpr (std::is_same_v<P, TrivialRepFixture>) {
          if (!(p.target_gap > 0.0 && p.target_gap < 1.0 - 1.0 / p.k)) {
            throw ContractViolation("synth: target gap must lie in (0, 1 - 1/k)");
          }
        }
        if constexpr (std::is_same_v<P, MarginFixture>) {
          if (p.profile.empty()) throw ContractViolation("synth: empty margin profile");
          for (const auto& [gamma, fraction] : p.profile) {
            if (!(gamma > 0.0 && gamma <= 1.0) || !(fraction > 0.0)) {
              throw ContractViolation("synth: margin entries need gamma in (0,1], fraction > 0");
            }
          }
        }
      },
      preset);
}

std::pair<std::size_t, std::size_t> margin_block(double gamma) {
  for (std::size_t m = 1; m <= 1000; ++m) {
    const double a = static_cast<double>(m) * (1.0 + gamma) / 2.0;
    const double rounded = std::round(a);
    if (std::abs(a - rounded) < 1e-9 && rounded >= 1.0) {
      return {m, static_cast<std::size_t>(rounded)};
    }
  }
  std::ostringstream msg;
  msg << "margin " << gamma << " is not representable with blocks of <= 1000 rows";
  throw ContractViolation(msg.str());
}

SplitDataset synth(const SynthSpec& spec) {
  spec.validate();
  const std::uint64_t train_seed = derive_seed(spec.seed, 0);
  const std::uint64_t test_seed = derive_seed(spec.seed, 1);
  return std::visit(
      [&](const auto& p) -> SplitDataset {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MarginFixture>) {
          // The fixture is evaluated on its own rows.
          LabeledEmbeddings train = margin_dataset(p, spec.n_train);
          return {train, std::move(train)};
        } else {
          return {gaussian_split(p.k, p.d, p.separation, spec.n_train, train_seed),
                  gaussian_split(p.k, p.d, p.separation, spec.n_test, test_seed)};
        }
      },
      spec.preset);
}

LabeledEmbeddings augment(const LabeledEmbeddings& data, std::uint32_t copies, double jitter,
                          std::uint64_t seed) {
  if (copies < 1) throw ContractViolation("augment: copies must be >= 1");
  if (!(jitter >= 0.0)) throw ContractViolation("augment: jitter must be >= 0");
  Rng rng(seed);
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  FeatureMatrix x(static_cast<Eigen::Index>(n * copies), static_cast<Eigen::Index>(d));
  std::vector<ClassIndex> labels(n * copies);
  std::vector<std::uint32_t> groups(n * copies);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t group =
        data.group_ids() ? (*data.group_ids())[i] : static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < copies; ++j) {
      const std::size_t row = i * copies + j;
      for (std::size_t c = 0; c < d; ++c) {
        const double noise = jitter > 0.0 ? jitter * rng.normal() : 0.0;
        x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = data.row(i)[c] + noise;
      }
      labels[row] = data.labels()[i];
      groups[row] = group;
    }
  }
  return {std::move(x), std::move(labels), data.num_classes(), std::move(groups)};
}

}  // namespace rrm
