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

#include "rrm/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace rrm {

namespace {

using Exact = boost::multiprecision::cpp_rational;

Exact exact(double v) { return Exact(v); }

Exact positive_part(const Exact& v) { return v > 0 ? v : Exact(0); }

double to_double(const Exact& v) {
  return static_cast<double>(v);
}

}  // namespace

LabeledEmbeddings::LabeledEmbeddings(
    FeatureMatrix features, std::vector<ClassIndex> labels,
    std::uint32_t num_classes,
    std::optional<std::vector<std::uint32_t>> group_ids)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      group_ids_(std::move(group_ids)) {
  if (num_classes_ < 2) {
    throw ContractViolation("num_classes must be >= 2");
  }
  if (labels_.empty()) throw ContractViolation("dataset must have n >= 1");
  if (features_.cols() < 1) throw ContractViolation("dataset must have d >= 1");
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    std::ostringstream msg;
    msg << "feature rows (" << features_.rows() << ") != labels ("
        << labels_.size() << ")";
    throw ContractViolation(msg.str());
  }
  if (group_ids_ && group_ids_->size() != labels_.size()) {
    throw ContractViolation("group_ids length differs from labels length");
  }
  check_labels(labels_, num_classes_);
  if (!features_.allFinite()) throw ContractViolation("features must be finite");
}

LabeledEmbeddings LabeledEmbeddings::permuted(
    std::span<const std::size_t> perm) const {
  if (perm.size() != size()) throw ContractViolation("permutation size mismatch");
  FeatureMatrix f(features_.rows(), features_.cols());
  std::vector<ClassIndex> l(size());
  std::optional<std::vector<std::uint32_t>> g;
  if (group_ids_) g.emplace(size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    f.row(static_cast<Eigen::Index>(j)) =
        features_.row(static_cast<Eigen::Index>(perm[j]));
    l[j] = labels_[perm[j]];
    if (g) (*g)[j] = (*group_ids_)[perm[j]];
  }
  return {std::move(f), std::move(l), num_classes_, std::move(g)};
}

void check_labels(std::span<const ClassIndex> labels, std::uint32_t k) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) {
      std::ostringstream msg;
      msg << "label " << labels[i] << " at index " << i
          << " is outside {0.." << (k - 1) << "}";
      throw ContractViolation(msg.str());
    }
  }
}

std::string to_string(NoiseVariant v) {
  return v == NoiseVariant::UniformAll ? "uniform-all" : "uniform-other";
}

std::string to_string(BoundDenominator d) {
  return d == BoundDenominator::Eta ? "eta" : "empirical";
}

NoiseVariant parse_noise_variant(const std::string& s) {
  if (s == "uniform-all") return NoiseVariant::UniformAll;
  if (s == "uniform-other") return NoiseVariant::UniformOther;
  throw ContractViolation("unknown noise model: " + s);
}

BoundDenominator parse_bound_denominator(const std::string& s) {
  if (s == "eta") return BoundDenominator::Eta;
  if (s == "empirical") return BoundDenominator::EmpiricalFlipRate;
  throw ContractViolation("unknown bound denominator: " + s);
}

double accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> labels) {
  if (predictions.size() != labels.size()) {
    throw ContractViolation("accuracy: predictions/labels length mismatch");
  }
  if (labels.empty()) throw ContractViolation("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += predictions[i] == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

GapDecomposition assemble_gaps(const AccuracyQuad& acc) {
  if (!acc.ntrain_noisy) throw UndefinedNTrainError();
  const Exact train = exact(acc.train);
  const Exact test = exact(acc.test);
  const Exact noisy = exact(acc.train_noisy);
  const Exact ntrain = exact(*acc.ntrain_noisy);

  const Exact robustness = positive_part(train - noisy);
  const Exact rationality = positive_part(ntrain - test);
  const Exact memorization = positive_part(noisy - ntrain);

  GapDecomposition out;
  out.robustness = to_double(robustness);
  out.rationality = to_double(rationality);
  out.memorization = to_double(memorization);
  out.generalization = to_double(train - test);
  out.rrm_bound = to_double(robustness + rationality + memorization);
  return out;
}

}  // namespace rrm
