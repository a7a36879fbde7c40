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

#include "rrm/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>

namespace rrm {

namespace {

constexpr Eigen::Index kIterativeThreshold = 4096;

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};

Standardization standardization_for(const FeatureMatrix& x, bool enabled) {
  const Eigen::Index d = x.cols();
  Standardization s{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  if (!enabled) return s;
  s.mean = x.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().mean();
    if (var > 0.0) s.scale(j) = std::sqrt(var);
  }
  return s;
}

Eigen::MatrixXd build_design(const FeatureMatrix& rows, const Standardization& s,
                             bool with_bias) {
  const Eigen::Index d = rows.cols();
  Eigen::MatrixXd r(rows.rows(), d + (with_bias ? 1 : 0));
  r.leftCols(d) = (rows.rowwise() - s.mean.transpose()).array().rowwise() /
                  s.scale.transpose().array();
  if (with_bias) r.col(d).setOnes();
  return r;
}

Eigen::MatrixXd one_hot(std::span<const ClassIndex> labels, std::uint32_t k) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

void check_override(const LabeledEmbeddings& data, std::span<const ClassIndex> labels) {
  if (labels.size() != data.size()) {
    throw ContractViolation("training labels length differs from dataset size");
  }
  check_labels(labels, data.num_classes());
}

struct System {
  Standardization standardization;
  NormalEquations equations;
};

System build_system(const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
                    const RidgeConfig& config) {
  config.validate();
  check_override(data, labels);
  if (!data.features().allFinite()) {
    throw ContractViolation("ridge_fit: non-finite feature value");
  }
  System sys;
  sys.standardization = standardization_for(data.features(), config.standardize);
  const Eigen::MatrixXd r =
      build_design(data.features(), sys.standardization, config.fit_bias);
  const Eigen::Index p = r.cols();
  sys.equations.gram = Eigen::MatrixXd(p, p);
  sys.equations.gram.setZero();
  sys.equations.gram.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose());
  sys.equations.gram = sys.equations.gram.selfadjointView<Eigen::Lower>();
  sys.equations.gram.diagonal().array() += config.lambda;
  sys.equations.rhs = r.transpose() * one_hot(labels, data.num_classes());
  return sys;
}

std::size_t numerical_rank(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  const double tol = top * static_cast<double>(gram.rows()) *
                     std::numeric_limits<double>::epsilon();
  return static_cast<std::size_t>((values.array() > tol).count());
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs) {
  const Eigen::Index p = gram.rows();
  if (p > kIterativeThreshold) {
    Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(10 * p);
    cg.compute(gram);
    return cg.solve(rhs);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  // Rounding can make a barely-regularized system fail Cholesky.
  return Eigen::LDLT<Eigen::MatrixXd>(gram).solve(rhs);
}

}  // namespace

void RidgeConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ContractViolation("ridge lambda must be a finite value >= 0");
  }
}

SingularSystemError::SingularSystemError(std::size_t rank, std::size_t size)
    : std::runtime_error("ridge normal equations are singular at lambda = 0: rank " +
                         std::to_string(rank) + " of " + std::to_string(size)),
      rank_(rank),
      size_(size) {}

LinearClassifier::LinearClassifier(Eigen::MatrixXd weights, bool with_bias,
                                   Eigen::VectorXd feature_mean,
                                   Eigen::VectorXd feature_scale)
    : weights_(std::move(weights)),
      with_bias_(with_bias),
      mean_(std::move(feature_mean)),
      scale_(std::move(feature_scale)) {
  if (weights_.rows() < 2) throw ContractViolation("linear classifier needs k >= 2");
  if (mean_.size() != scale_.size() ||
      weights_.cols() != mean_.size() + (with_bias_ ? 1 : 0)) {
    throw ContractViolation("linear classifier parameter shapes disagree");
  }
}

Eigen::VectorXd LinearClassifier::scores(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean_.size()) {
    throw ContractViolation("feature vector dimension mismatch");
  }
  const Eigen::Index d = mean_.size();
  Eigen::VectorXd z = (Eigen::Map<const Eigen::VectorXd>(x.data(), d) - mean_)
                          .cwiseQuotient(scale_);
  Eigen::VectorXd s = weights_.leftCols(d) * z;
  if (with_bias_) s += weights_.col(d);
  return s;
}

ClassIndex LinearClassifier::predict(std::span<const double> x) const {
  const Eigen::VectorXd s = scores(x);
  return argmax_smallest({s.data(), static_cast<std::size_t>(s.size())});
}

Eigen::MatrixXd LinearClassifier::design(const FeatureMatrix& rows) const {
  if (rows.cols() != mean_.size()) {
    throw ContractViolation("feature matrix dimension mismatch");
  }
  return build_design(rows, {mean_, scale_}, with_bias_);
}

Eigen::MatrixXd LinearClassifier::score_rows(const FeatureMatrix& rows) const {
  return design(rows) * weights_.transpose();
}

std::vector<ClassIndex> LinearClassifier::predict_rows(const FeatureMatrix& rows) const {
  // Row-major copy so each score row is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> s =
      score_rows(rows);
  std::vector<ClassIndex> out(static_cast<std::size_t>(s.rows()));
  const auto k = static_cast<std::size_t>(s.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = argmax_smallest({s.data() + i * k, k});
  }
  return out;
}

NormalEquations ridge_normal_equations(const LabeledEmbeddings& data,
                                       std::span<const ClassIndex> labels,
                                       const RidgeConfig& config) {
  return build_system(data, labels, config).equations;
}

std::shared_ptr<const LinearClassifier> ridge_fit(const LabeledEmbeddings& data,
                                                  std::span<const ClassIndex> labels,
                                                  const RidgeConfig& config) {
  System sys = build_system(data, labels, config);
  const Eigen::MatrixXd& gram = sys.equations.gram;
  if (config.lambda == 0.0) {
    const std::size_t rank = numerical_rank(gram);
    if (rank < static_cast<std::size_t>(gram.rows())) {
      throw SingularSystemError(rank, static_cast<std::size_t>(gram.rows()));
    }
  }
  Eigen::MatrixXd weights = solve_spd(gram, sys.equations.rhs).transpose();
  return std::make_shared<const LinearClassifier>(
      std::move(weights), config.fit_bias, std::move(sys.standardization.mean),
      std::move(sys.standardization.scale));
}

double ridge_relative_residual(const LinearClassifier& model,
                               const NormalEquations& system) {
  const Eigen::MatrixXd residual =
      system.gram * model.weights().transpose() - system.rhs;
  return residual.norm() / (1.0 + system.rhs.norm());
}

FiniteHypothesisClass::FiniteHypothesisClass(std::vector<Hypothesis> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw ContractViolation("hypothesis class must be non-empty");
}

FiniteHypothesisClass constant_class(std::uint32_t k) {
  std::vector<Hypothesis> members;
  for (std::uint32_t c = 0; c < k; ++c) {
    members.push_back({"constant-" + std::to_string(c),
                       [c](std::span<const double>) { return ClassIndex{c}; }});
  }
  return FiniteHypothesisClass(std::move(members));
}

FiniteHypothesisClass threshold_class(const LabeledEmbeddings& data,
                                      std::size_t coordinate) {
  if (coordinate >= data.dim()) throw ContractViolation("threshold coordinate out of range");
  std::vector<double> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) values[i] = data.row(i)[coordinate];
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<double> thresholds{values.front() - 1.0};
  for (std::size_t j = 1; j < values.size(); ++j) {
    thresholds.push_back(0.5 * (values[j - 1] + values[j]));
  }

  const std::uint32_t k = data.num_classes();
  std::vector<Hypothesis> members;
  for (double t : thresholds) {
    for (ClassIndex above = 0; above < k; ++above) {
      for (ClassIndex below = 0; below < k; ++below) {
        if (above == below) continue;
        std::ostringstream name;
        name << "x[" << coordinate << "]>=" << t << "?" << above << ":" << below;
        members.push_back({name.str(), [=](std::span<const double> x) {
                             return x[coordinate] >= t ? above : below;
                           }});
      }
    }
  }
  return FiniteHypothesisClass(std::move(members));
}

ErmResult erm_fit(const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
                  const FiniteHypothesisClass& hypotheses) {
  check_override(data, labels);
  ErmResult best;
  best.errors = std::numeric_limits<std::size_t>::max();
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    const auto& rule = hypotheses[h].rule;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < data.size() && errors < best.errors; ++i) {
      errors += rule(data.row(i)) != labels[i] ? 1 : 0;
    }
    if (errors < best.errors) {
      best.errors = errors;
      best.index = h;
    }
  }
  best.classifier = std::make_shared<FunctionClassifier>(hypotheses[best.index].rule);
  return best;
}

MarginProfile::MarginProfile(std::vector<double> margins) : margins_(std::move(margins)) {
  if (margins_.empty()) throw ContractViolation("margin profile of zero points");
  std::sort(margins_.begin(), margins_.end());
}

double MarginProfile::operator()(double gamma) const {
  if (gamma <= 0.0) return 1.0;
  const auto first = std::lower_bound(margins_.begin(), margins_.end(), gamma);
  return static_cast<double>(margins_.end() - first) /
         static_cast<double>(margins_.size());
}

MarginProfile margin_profile_from_scores(const Eigen::MatrixXd& scores) {
  if (scores.cols() < 2) throw ContractViolation("margin profile needs k >= 2");
  std::vector<double> margins(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double top = -std::numeric_limits<double>::infinity();
    double second = top;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      const double v = scores(i, j);
      if (v > top) {
        second = top;
        top = v;
      } else if (v > second) {
        second = v;
      }
    }
    margins[static_cast<std::size_t>(i)] = top - second;
  }
  return MarginProfile(std::move(margins));
}

MarginProfile margin_profile(const LinearClassifier& model, const LabeledEmbeddings& data) {
  return margin_profile_from_scores(model.score_rows(data.features()));
}

Trainer ridge_trainer(RidgeConfig config) {
  config.validate();
  return [config](const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
                  std::uint64_t) -> ClassifierPtr {
    return ridge_fit(data, labels, config);
  };
}

Trainer erm_trainer(FiniteHypothesisClass hypotheses) {
  return [hs = std::move(hypotheses)](const LabeledEmbeddings& data,
                                      std::span<const ClassIndex> labels,
                                      std::uint64_t) -> ClassifierPtr {
    return erm_fit(data, labels, hs).classifier;
  };
}

Trainer constant_trainer(ClassIndex value) {
  auto model = std::make_shared<const FunctionClassifier>(
      [value](std::span<const double>) { return value; });
  return [model](const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
                 std::uint64_t) -> ClassifierPtr {
    check_override(data, labels);
    return model;
  };
}

Trainer majority_trainer() {
  return [](const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
            std::uint64_t) -> ClassifierPtr {
    check_override(data, labels);
    std::vector<std::size_t> counts(data.num_classes(), 0);
    for (ClassIndex y : labels) ++counts[y];
    const auto winner = static_cast<ClassIndex>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    return std::make_shared<const FunctionClassifier>(
        [winner](std::span<const double>) { return winner; });
  };
}

namespace {

struct RowKeyHash {
  std::size_t operator()(const std::vector<double>& row) const {
    return static_cast<std::size_t>(hash_row(row));
  }
};

class TableClassifier final : public Classifier {
 public:
  TableClassifier(std::unordered_map<std::vector<double>, ClassIndex, RowKeyHash> table,
                  ClassIndex fallback)
      : table_(std::move(table)), fallback_(fallback) {}

  ClassIndex predict(std::span<const double> x) const override {
    const auto it = table_.find(std::vector<double>(x.begin(), x.end()));
    return it == table_.end() ? fallback_ : it->second;
  }

 private:
  std::unordered_map<std::vector<double>, ClassIndex, RowKeyHash> table_;
  ClassIndex fallback_;
};

}  // namespace

Trainer interpolating_trainer(ClassIndex fallback) {
  return [fallback](const LabeledEmbeddings& data, std::span<const ClassIndex> labels,
                    std::uint64_t) -> ClassifierPtr {
    check_override(data, labels);
    const std::uint32_t k = data.num_classes();
    std::unordered_map<std::vector<double>, std::vector<std::size_t>, RowKeyHash> votes;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto& v = votes[std::vector<double>(data.row(i).begin(), data.row(i).end())];
      if (v.empty()) v.assign(k, 0);
      ++v[labels[i]];
    }
    std::unordered_map<std::vector<double>, ClassIndex, RowKeyHash> table;
    for (auto& [row, count] : votes) {
      table.emplace(row, static_cast<ClassIndex>(
                             std::max_element(count.begin(), count.end()) - count.begin()));
    }
    return std::make_shared<const TableClassifier>(std::move(table), fallback);
  };
}

}  // namespace rrm
