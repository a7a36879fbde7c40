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

#include "rrm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rrm/infotheory.hpp"
#include "rrm/io.hpp"
#include "rrm/rng.hpp"
#include "rrm/trainers.hpp"

namespace rrm {

namespace {

using boost::multiprecision::cpp_int;

struct PatternWeights {
  cpp_int keep;     // numerator of P(N_i = 0)
  cpp_int each;     // numerator of P(N_i = j) for each j != 0
  cpp_int denom;    // common denominator
};

PatternWeights per_sample_weights(NoiseVariant variant, RationalEta eta, std::uint32_t k) {
  PatternWeights w;
  if (variant == NoiseVariant::UniformOther) {
    w.denom = cpp_int(eta.den) * (k - 1);
    w.keep = cpp_int(eta.den - eta.num) * (k - 1);
    w.each = eta.num;
  } else {
    w.denom = cpp_int(eta.den) * k;
    w.keep = cpp_int(eta.den) * k - cpp_int(eta.num) * (k - 1);
    w.each = eta.num;
  }
  return w;
}

std::size_t checked_pattern_count(const ExactScenario& s) {
  const std::size_t n = s.train.size();
  const std::uint32_t k = s.train.num_classes();
  if (n > 10) throw EnumerationLimitError("oracle scenario has n > 10");
  if (k > 3) throw EnumerationLimitError("oracle scenario has k > 3");
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) {
    patterns *= k;
    if (patterns > kMaxOraclePatterns) {
      throw EnumerationLimitError("oracle scenario exceeds 3^10 noise patterns");
    }
  }
  if (s.eta.num == 0 || s.eta.num >= s.eta.den) {
    throw ContractViolation("oracle eta must satisfy 0 < num < den");
  }
  return patterns;
}

double entropy_of_masses(const std::map<std::vector<ClassIndex>, double>& masses) {
  double total = 0.0;
  for (const auto& [key, p] : masses) total += p;
  double h = 0.0;
  for (const auto& [key, p] : masses) {
    if (p > 0.0) h -= (p / total) * std::log(p / total);
  }
  return std::max(h, 0.0);
}

}  // namespace

std::string to_string(OracleTrainerKind kind) {
  switch (kind) {
    case OracleTrainerKind::Constant: return "constant";
    case OracleTrainerKind::Majority: return "majority";
    case OracleTrainerKind::Interpolator: return "interpolator";
    case OracleTrainerKind::ThresholdErm: return "threshold-erm";
  }
  return "unknown";
}

OracleTrainerKind parse_oracle_trainer(const std::string& name) {
  for (auto kind : {OracleTrainerKind::Constant, OracleTrainerKind::Majority,
                    OracleTrainerKind::Interpolator, OracleTrainerKind::ThresholdErm}) {
    if (to_string(kind) == name) return kind;
  }
  throw ContractViolation("unknown oracle trainer: " + name);
}

Trainer ExactScenario::trainer() const {
  switch (trainer_kind) {
    case OracleTrainerKind::Constant: return constant_trainer(constant_value);
    case OracleTrainerKind::Majority: return majority_trainer();
    case OracleTrainerKind::Interpolator: return interpolating_trainer(0);
    case OracleTrainerKind::ThresholdErm: return erm_trainer(threshold_class(train, 0));
  }
  throw ContractViolation("unknown oracle trainer kind");
}

FeatureMatrix probe_points(const LabeledEmbeddings& train) {
  const auto n = static_cast<Eigen::Index>(train.size());
  const auto d = static_cast<Eigen::Index>(train.dim());
  if (d != 1) {
    FeatureMatrix probes(n + 1, d);
    probes.topRows(n) = train.features();
    probes.row(n).setZero();
    return probes;
  }
  std::vector<double> values(train.features().data(), train.features().data() + n);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> points{values.front() - 1.0};
  for (std::size_t j = 0; j < values.size(); ++j) {
    points.push_back(values[j]);
    if (j + 1 < values.size()) points.push_back(0.5 * (values[j] + values[j + 1]));
  }
  points.push_back(values.back() + 1.0);
  FeatureMatrix probes(static_cast<Eigen::Index>(points.size()), 1);
  for (std::size_t j = 0; j < points.size(); ++j) probes(static_cast<Eigen::Index>(j), 0) = points[j];
  return probes;
}

ExactQuantities enumerate(const ExactScenario& scenario) {
  const std::size_t patterns = checked_pattern_count(scenario);
  const LabeledEmbeddings& train = scenario.train;
  const std::size_t n = train.size();
  const std::uint32_t k = train.num_classes();
  const std::vector<ClassIndex>& clean = train.labels();
  const Trainer trainer = scenario.trainer();
  const FeatureMatrix probes = probe_points(train);
  const PatternWeights w = per_sample_weights(scenario.noise, scenario.eta, k);
  const cpp_int total_denominator = pow(w.denom, static_cast<unsigned>(n));

  ExactQuantities q;
  q.patterns = patterns;

  cpp_int correct_mass = 0;        // sum_pattern weight * #correct
  cpp_int flipped_mass = 0;        // sum_pattern weight * #flipped
  cpp_int flipped_correct_mass = 0;
  cpp_int weight_sum = 0;

  Eigen::MatrixXd deviation_joint = Eigen::MatrixXd::Zero(k, k);
  std::vector<Eigen::MatrixXd> index_joints(n, Eigen::MatrixXd::Zero(k, k));
  std::map<std::vector<ClassIndex>, double> model_mass;
  std::map<std::vector<ClassIndex>, double> prediction_mass;

  std::vector<std::uint32_t> deviation(n, 0);
  std::vector<ClassIndex> noisy(n);
  for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
    // Mixed-radix decode: sample i's deviation is digit i in base k.
    std::size_t code = pattern;
    std::size_t flips = 0;
    for (std::size_t i = 0; i < n; ++i) {
      deviation[i] = static_cast<std::uint32_t>(code % k);
      code /= k;
      flips += deviation[i] != 0;
      noisy[i] = (clean[i] + deviation[i]) % k;
    }
    const cpp_int weight =
        pow(w.keep, static_cast<unsigned>(n - flips)) * pow(w.each, static_cast<unsigned>(flips));
    const double p = static_cast<double>(ExactRational(weight, total_denominator));
    weight_sum += weight;
    q.probability_mass += p;

    const ClassifierPtr model = trainer(train, noisy, 0);
    const std::vector<ClassIndex> predictions = model->predict_rows(train.features());
    model_mass[model->predict_rows(probes)] += p;
    prediction_mass[predictions] += p;

    std::size_t correct = 0;
    std::size_t flipped_correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool hit = predictions[i] == clean[i];
      correct += hit;
      if (deviation[i] != 0) flipped_correct += hit;
      const std::uint32_t delta = (predictions[i] + k - clean[i]) % k;
      deviation_joint(delta, deviation[i]) += p / static_cast<double>(n);
      index_joints[i](predictions[i], noisy[i]) += p;
    }
    correct_mass += weight * correct;
    flipped_mass += weight * flips;
    flipped_correct_mass += weight * flipped_correct;
  }
  if (weight_sum != total_denominator) {
    throw std::logic_error("oracle: pattern probabilities do not sum to one");
  }

  q.train_eta_exact = ExactRational(correct_mass, total_denominator * n);
  q.train_eta = static_cast<double>(q.train_eta_exact);
  if (flipped_mass > 0) {
    q.ntrain_eta_exact = ExactRational(flipped_correct_mass, flipped_mass);
    q.ntrain_eta = static_cast<double>(*q.ntrain_eta_exact);
  }
  q.flip_probability =
      static_cast<double>(ExactRational(flipped_mass, total_denominator * n));

  // Renormalise away the ~1e-16 drift of the double masses before taking MI.
  deviation_joint /= deviation_joint.sum();
  q.cdc = static_cast<double>(n) * mutual_information(deviation_joint);
  for (auto& joint : index_joints) {
    joint /= joint.sum();
    q.cpc += mutual_information(joint);
  }
  q.cmdl = entropy_of_masses(model_mass);
  q.prediction_entropy = entropy_of_masses(prediction_mass);

  if (q.ntrain_eta_exact) {
    const ExactRational gap = q.train_eta_exact - *q.ntrain_eta_exact;
    q.memorization_gap = gap > 0 ? static_cast<double>(gap) : 0.0;
  }
  const double root = std::sqrt(q.cdc / (2.0 * static_cast<double>(n)));
  q.thm2_rhs = root / q.flip_probability;
  q.thm2_rhs_eta = root / scenario.eta.value();
  return q;
}

ExactScenario random_scenario(std::uint64_t seed, const ChainOptions& options) {
  Rng rng(seed);
  const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.uniform_index(
                                  std::max<std::uint32_t>(options.max_k, 2) - 1));
  std::size_t max_n = std::min<std::size_t>(options.max_n, 10);
  while (max_n > 1 && std::pow(static_cast<double>(k), static_cast<double>(max_n)) >
                          static_cast<double>(kMaxOraclePatterns)) {
    --max_n;
  }
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_index(max_n));

  FeatureMatrix features(static_cast<Eigen::Index>(n), 1);
  std::vector<ClassIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    features(static_cast<Eigen::Index>(i), 0) = static_cast<double>(rng.uniform_index(5));
    labels[i] = static_cast<ClassIndex>(rng.uniform_index(k));
  }

  static constexpr RationalEta kEtas[] = {{1, 20}, {1, 10}, {1, 5}, {1, 4}, {1, 3}, {1, 2}};
  static constexpr OracleTrainerKind kKinds[] = {
      OracleTrainerKind::Constant, OracleTrainerKind::Majority,
      OracleTrainerKind::Interpolator, OracleTrainerKind::ThresholdErm};

  ExactScenario s{LabeledEmbeddings(std::move(features), std::move(labels), k)};
  s.trainer_kind = kKinds[rng.uniform_index(std::size(kKinds))];
  s.constant_value = static_cast<ClassIndex>(rng.uniform_index(k));
  s.noise = NoiseVariant::UniformOther;
  s.eta = kEtas[rng.uniform_index(std::size(kEtas))];
  return s;
}

ChainCertification certify_chain(std::size_t count, std::uint64_t seed,
                                 const ChainOptions& options) {
  if (count < 1) throw ContractViolation("certify_chain: count must be >= 1");
  ChainCertification result;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const ExactScenario scenario = random_scenario(derive_seed(seed, idx), options);
    const ExactQuantities q = enumerate(scenario);
    ++result.scenarios;

    std::ostringstream problems;
    if (q.cdc > q.cpc + options.tolerance) {
      problems << "C^dc " << q.cdc << " > C^pc " << q.cpc << "; ";
    }
    if (q.cpc > q.cmdl + options.tolerance) {
      problems << "C^pc " << q.cpc << " > C^mdl " << q.cmdl << "; ";
    }
    if (q.memorization_gap > q.thm2_rhs + options.tolerance) {
      problems << "memorization gap " << q.memorization_gap << " > bound " << q.thm2_rhs
               << "; ";
    }
    if (std::abs(q.probability_mass - 1.0) > options.tolerance) {
      problems << "probability mass " << q.probability_mass << "; ";
    }
    const std::string text = problems.str();
    if (text.empty()) continue;

    ChainViolation violation{idx, text, std::nullopt};
    if (options.dump_dir) {
      const auto stem = *options.dump_dir / ("counterexample_" + std::to_string(idx));
      write_scenario(scenario, stem);
      violation.dump_path = stem;
    }
    result.violations.push_back(std::move(violation));
  }
  return result;
}

}  // namespace rrm
