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

#include "oracles.hpp"

#include <cmath>

namespace rrm::testing {

double ref_entropy(const std::vector<double>& p) {
  double total = 0.0;
  for (double v : p) total += v;
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= (v / total) * std::log(v / total);
  }
  return h;
}

double binary_entropy(double p) { return ref_entropy({p, 1.0 - p}); }

double ref_mi(const Table& joint) {
  std::vector<double> rows(joint.size(), 0.0);
  std::vector<double> cols(joint.front().size(), 0.0);
  std::vector<double> cells;
  for (std::size_t r = 0; r < joint.size(); ++r) {
    for (std::size_t c = 0; c < joint[r].size(); ++c) {
      rows[r] += joint[r][c];
      cols[c] += joint[r][c];
      cells.push_back(joint[r][c]);
    }
  }
  return ref_entropy(rows) + ref_entropy(cols) - ref_entropy(cells);
}

RefExact ref_enumerate(const std::vector<std::uint32_t>& clean, std::uint32_t k,
                       std::uint32_t eta_num, std::uint32_t eta_den,
                       const std::function<std::vector<std::uint32_t>(
                           const std::vector<std::uint32_t>&)>& predictions,
                       const std::function<std::vector<std::uint32_t>(
                           const std::vector<std::uint32_t>&)>& identity) {
  const std::size_t n = clean.size();
  const long double eta = static_cast<long double>(eta_num) / eta_den;
  RefExact out;
  long double correct = 0, flipped = 0, flipped_correct = 0;
  Table dc(k, std::vector<double>(k, 0.0));
  std::vector<Table> pc(n, Table(k, std::vector<double>(k, 0.0)));
  // Map-reduce over the first sample's deviation: one partial map per value.
  std::vector<std::map<std::vector<std::uint32_t>, long double>> partial(k);

  std::vector<std::uint32_t> noisy(n);
  std::vector<std::uint32_t> dev(n);
  std::function<void(std::size_t, long double)> walk = [&](std::size_t i, long double p) {
    if (i == n) {
      out.mass += p;
      const auto pred = predictions(noisy);
      partial[dev[0]][identity(noisy)] += p;
      for (std::size_t j = 0; j < n; ++j) {
        const bool hit = pred[j] == clean[j];
        correct += p * hit;
        if (dev[j] != 0) {
          flipped += p;
          flipped_correct += p * hit;
        }
        dc[(pred[j] + k - clean[j]) % k][dev[j]] += static_cast<double>(p) / n;
        pc[j][pred[j]][noisy[j]] += static_cast<double>(p);
      }
      return;
    }
    for (std::uint32_t d = 0; d < k; ++d) {
      dev[i] = d;
      noisy[i] = (clean[i] + d) % k;
      walk(i + 1, p * (d == 0 ? 1 - eta : eta / (k - 1)));
    }
  };
  walk(0, 1.0L);

  std::map<std::vector<std::uint32_t>, long double> law;
  for (const auto& m : partial) {
    for (const auto& [key, p] : m) law[key] += p;
  }
  std::vector<double> masses;
  for (const auto& [key, p] : law) masses.push_back(static_cast<double>(p));

  out.train_eta = correct / n;
  out.flip_probability = flipped / n;
  out.ntrain_eta = flipped > 0 ? flipped_correct / flipped : 0;
  out.cdc = static_cast<double>(n) * ref_mi(dc);
  for (const auto& t : pc) out.cpc += ref_mi(t);
  out.cmdl = ref_entropy(masses);
  out.memorization_gap = static_cast<double>(std::max<long double>(out.train_eta - out.ntrain_eta, 0));
  return out;
}

std::uint32_t ref_majority(const std::vector<std::uint32_t>& labels, std::uint32_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (auto y : labels) ++counts[y];
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < k; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

Eigen::MatrixXd ref_ridge(const Eigen::MatrixXd& features, const std::vector<std::uint32_t>& labels,
                          std::uint32_t k, double lambda, bool bias) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols() + (bias ? 1 : 0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + p, p);
  a.topLeftCorner(n, features.cols()) = features;
  if (bias) a.block(0, p - 1, n, 1).setOnes();
  a.bottomRows(p) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + p, k);
  for (Eigen::Index i = 0; i < n; ++i) b(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return a.colPivHouseholderQr().solve(b).transpose();
}

}  // namespace rrm::testing
