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

// File formats.
//
// Embedding file (all integers little-endian):
//   offset 0   8 bytes  magic "RRMEMB01"
//   offset 8   u32 n, u32 d, u32 k, u32 flags (bit 0: group ids present)
//   offset 24  n*d float32, row-major
//   then       n u32 labels
//   then       n u32 group ids (only when flags bit 0 is set)
//
// Reports are JSON objects with a fixed key set (see write_report).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrm/core.hpp"
#include "rrm/oracle.hpp"

namespace rrm {

/// A malformed input file. offset() is the byte (or, for text formats, the
/// line) at which the problem was detected.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

inline constexpr char kEmbeddingMagic[8] = {'R', 'R', 'M', 'E', 'M', 'B', '0', '1'};
inline constexpr std::uint32_t kFlagGroupIds = 1u;

/// Exact byte length of an embedding file with the given shape.
std::uint64_t embedding_file_size(std::uint64_t n, std::uint64_t d, bool grouped);

std::vector<std::uint8_t> encode_embeddings(const LabeledEmbeddings& data);
LabeledEmbeddings decode_embeddings(const std::vector<std::uint8_t>& bytes);

void write_embeddings(const LabeledEmbeddings& data, const std::filesystem::path& path);
LabeledEmbeddings read_embeddings(const std::filesystem::path& path);

/// CSV with header `label,group,f0,...,f{d-1}`; the group column is empty on
/// every row when the dataset has no group ids. `num_classes` defaults to
/// max label + 1 (at least 2) on read.
void write_embeddings_csv(const LabeledEmbeddings& data, const std::filesystem::path& path);
LabeledEmbeddings read_embeddings_csv(const std::filesystem::path& path,
                                      std::optional<std::uint32_t> num_classes = std::nullopt);

/// Keys: eta, trials, n_train, num_classes, noise_model, bound_denominator,
/// train_acc, test_acc, train_noisy, ntrain_noisy, robustness_gap,
/// rationality_gap, memorization_gap, generalization_gap, rrm_bound,
/// cdc_nats, cpc_nats, thm2_bound, thm2_bound_capped, base_seed, per_trial.
/// Undefined values are written as null.
std::string format_report(const GapReport& report);
GapReport parse_report(const std::string& text);

void write_report(const GapReport& report, const std::filesystem::path& path);
GapReport read_report(const std::filesystem::path& path);

/// Single-line key=value summary of a report.
std::string summary_line(const GapReport& report);

/// <stem>.emb holds the train set, <stem>.scenario.json the trainer and noise.
void write_scenario(const ExactScenario& scenario, const std::filesystem::path& stem);
ExactScenario read_scenario(const std::filesystem::path& stem);

struct PlotRow {
  std::string name;
  double generalization_gap = 0.0;
  double robustness = 0.0;
  double rationality = 0.0;
  double memorization = 0.0;
  double rrm_bound = 0.0;
  std::optional<double> thm2_bound;
};

/// Requires a defined NTrain(eta) (all three gaps present).
PlotRow plot_row(const std::string& name, const GapReport& report);

/// Header plus one row per entry; rows sorted by generalization gap when
/// `sort_by_generalization` (stable, ascending).
std::string format_plot_csv(std::vector<PlotRow> rows, bool sort_by_generalization);

}  // namespace rrm
