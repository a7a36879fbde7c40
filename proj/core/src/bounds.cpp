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

#include "rrm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrm/rng.hpp"

namespace rrm {

namespace {

constexpr std::uint64_t kCleanStream = 0xC1EA4F17ULL;

}  // namespace

Thm2Bound thm2_bound(double cdc, std::size_t n, const NoiseModel& model,
                     std::uint32_t k, BoundDenominator mode) {
  if (n < 1) throw ContractViolation("thm2_bound: n must be >= 1");
  if (!(cdc >= 0.0)) throw ContractViolation("thm2_bound: complexity must be >= 0");
  if (!(model.eta > 0.0)) throw ContractViolation("thm2_bound: eta must be > 0");
  Thm2Bound out;
  out.cdc = cdc;
  out.n = n;
  out.eta_denominator =
      mode == BoundDenominator::Eta ? model.eta : model.flip_probability(k);
  out.value = std::sqrt(cdc / (2.0 * static_cast<double>(n))) / out.eta_denominator;
  out.capped_value = std::min(out.value, 1.0);
  return out;
}

std::uint64_t clean_seed(std::uint64_t base_seed) {
  return derive_seed(base_seed ^ kCleanStream, 0);
}

double binomial_sigma(double p, std::uint64_t samples) {
  if (samples == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
}

AuditResult audit_with_trials(const Trainer& trainer, const LabeledEmbeddings& train,
                              const LabeledEmbeddings& test, const NoiseModel& model,
                              std::uint32_t trials, std::uint64_t seed,
                              const AuditOptions& options) {
  model.validate();
  if (options.compute_cpc && trials < 2) {
    throw InsufficientTrialsError("prediction complexity needs at least 2 trials");
  }
  const std::uint32_t k = train.num_classes();

  AuditResult result;
  GapReport& report = result.report;
  report.eta = model.eta;
  report.trials = trials;
  report.n_train = train.size();
  report.num_classes = k;
  report.noise_model = model.variant;
  report.bound_denominator = options.denominator;
  report.base_seed = seed;

  const CleanAccuracies clean = run_clean(trainer, train, test, clean_seed(seed));
  result.trials = run_noisy_trials(trainer, train, model, trials, seed, options.threads);
  const NoisyAccuracies noisy = noisy_accuracies(result.trials, train.labels());

  report.accuracies = {clean.train, clean.test, noisy.train_noisy, noisy.ntrain_noisy};
  for (const NoisyTrial& t : result.trials) {
    const NoisyAccuracies one = noisy_accuracies(t, train.labels());
    report.per_trial.push_back(
        {t.trial_index, t.seed, one.corrupted_samples, one.train_noisy, one.ntrain_noisy});
  }

  if (report.accuracies.ntrain_noisy) {
    const GapDecomposition gaps = assemble_gaps(report.accuracies);
    report.robustness_gap = gaps.robustness;
    report.rationality_gap = gaps.rationality;
    report.memorization_gap = gaps.memorization;
    report.generalization_gap = gaps.generalization;
    report.rrm_bound = gaps.rrm_bound;
  } else {
    // Robustness and generalization do not involve NTrain(eta).
    AccuracyQuad partial = report.accuracies;
    partial.ntrain_noisy = partial.train_noisy;
    const GapDecomposition gaps = assemble_gaps(partial);
    report.robustness_gap = gaps.robustness;
    report.generalization_gap = gaps.generalization;
  }

  const ComplexityEstimate cdc = cdc_estimate(result.trials, train.labels(), k);
  report.cdc = cdc.value;
  const Thm2Bound bound = thm2_bound(cdc.value, train.size(), model, k, options.denominator);
  report.thm2_bound = bound.value;
  report.thm2_bound_capped = bound.capped_value;
  if (options.compute_cpc) {
    report.cpc =
        cpc_estimate(result.trials, train.labels(), k, options.miller_madow, options.threads)
            .value;
  }
  return result;
}

GapReport audit(const Trainer& trainer, const LabeledEmbeddings& train,
                const LabeledEmbeddings& test, const NoiseModel& model,
                std::uint32_t trials, std::uint64_t seed, const AuditOptions& options) {
  return audit_with_trials(trainer, train, test, model, trials, seed, options).report;
}

std::vector<RetentionRow> least_squares_robustness_check(
    const LabeledEmbeddings& data, const RidgeConfig& config, const NoiseModel& model,
    std::span<const double> gammas, std::uint32_t trials, std::uint64_t seed,
    unsigned threads) {
  for (double g : gammas) {
    if (!(g > 0.0)) throw ContractViolation("robustness check: gamma must be > 0");
  }
  const auto clean_fit = ridge_fit(data, data.labels(), config);
  // Margin of the clean label over the best other class (negative when the
  // clean fit misclassifies the point).
  const Eigen::MatrixXd scores = clean_fit->score_rows(data.features());
  std::vector<double> margins(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto y = static_cast<Eigen::Index>(data.labels()[i]);
    double runner_up = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (c != y) runner_up = std::max(runner_up, scores(r, c));
    }
    margins[i] = scores(r, y) - runner_up;
  }
  const MarginProfile profile(std::move(margins));

  const auto noisy = run_noisy_trials(ridge_trainer(config), data, model, trials, seed, threads);
  const NoisyAccuracies retained = noisy_accuracies(noisy, data.labels());
  const double flip = model.flip_probability(data.num_classes());

  std::vector<RetentionRow> rows;
  for (double gamma : gammas) {
    RetentionRow row;
    row.gamma = gamma;
    row.margin_fraction = profile(gamma);
    row.predicted = row.margin_fraction - 4.0 * flip / (gamma * gamma);
    row.observed = retained.train_noisy;
    row.sigma = binomial_sigma(row.observed, retained.total_samples);
    row.holds = row.observed >= row.predicted - 3.0 * row.sigma;
    rows.push_back(row);
  }
  return rows;
}

ErmRobustness erm_robustness_check(const LabeledEmbeddings& data,
                                   const FiniteHypothesisClass& hypotheses,
                                   const NoiseModel& model, std::uint32_t trials,
                                   std::uint64_t seed, unsigned threads) {
  const Trainer trainer = erm_trainer(hypotheses);
  const ErmResult clean = erm_fit(data, data.labels(), hypotheses);
  const auto noisy = run_noisy_trials(trainer, data, model, trials, seed, threads);
  const NoisyAccuracies acc = noisy_accuracies(noisy, data.labels());

  ErmRobustness out;
  out.train = 1.0 - static_cast<double>(clean.errors) / static_cast<double>(data.size());
  out.train_noisy = acc.train_noisy;
  out.gap = out.train - out.train_noisy;
  out.bound = 2.0 * model.eta;
  out.sigma = binomial_sigma(out.train_noisy, acc.total_samples);
  out.holds = out.gap <= out.bound + 3.0 * out.sigma;
  return out;
}

}  // namespace rrm
