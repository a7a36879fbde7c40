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

#include "rrm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rrm {

namespace {

using json = nlohmann::json;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::uint64_t offset) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(in[offset + static_cast<std::uint64_t>(b)]) << (8 * b);
  }
  return v;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string slurp_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(std::string("report is missing key '") + key + "'", 0);
  }
  return obj.at(key);
}

std::optional<double> read_optional(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

std::uint64_t embedding_file_size(std::uint64_t n, std::uint64_t d, bool grouped) {
  return 8 + 16 + 4 * n * d + 4 * n + (grouped ? 4 * n : 0);
}

std::vector<std::uint8_t> encode_embeddings(const LabeledEmbeddings& data) {
  const bool grouped = data.group_ids().has_value();
  std::vector<std::uint8_t> out;
  out.reserve(embedding_file_size(data.size(), data.dim(), grouped));
  out.insert(out.end(), std::begin(kEmbeddingMagic), std::end(kEmbeddingMagic));
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  put_u32(out, static_cast<std::uint32_t>(data.dim()));
  put_u32(out, data.num_classes());
  put_u32(out, grouped ? kFlagGroupIds : 0u);
  const FeatureMatrix& f = data.features();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(f.data()[i])));
  }
  for (ClassIndex y : data.labels()) put_u32(out, y);
  if (grouped) {
    for (std::uint32_t g : *data.group_ids()) put_u32(out, g);
  }
  return out;
}

LabeledEmbeddings decode_embeddings(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) throw FormatError("truncated magic", bytes.size());
  if (!std::equal(std::begin(kEmbeddingMagic), std::end(kEmbeddingMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError("bad magic, expected RRMEMB01", 0);
  }
  if (bytes.size() < 24) throw FormatError("truncated header", bytes.size());
  const std::uint64_t n = get_u32(bytes, 8);
  const std::uint64_t d = get_u32(bytes, 12);
  const std::uint32_t k = get_u32(bytes, 16);
  const std::uint32_t flags = get_u32(bytes, 20);
  if (flags & ~kFlagGroupIds) throw FormatError("unknown flag bits set", 20);
  if (n == 0) throw FormatError("dataset has n = 0 rows", 8);
  if (d == 0) throw FormatError("dataset has d = 0 columns", 12);
  if (k < 2) throw FormatError("class count k must be >= 2", 16);
  const bool grouped = (flags & kFlagGroupIds) != 0;
  const std::uint64_t expected = embedding_file_size(n, d, grouped);
  if (bytes.size() < expected) throw FormatError("truncated file", bytes.size());
  if (bytes.size() > expected) throw FormatError("trailing bytes after data", expected);

  FeatureMatrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::uint64_t offset = 24;
  for (std::uint64_t i = 0; i < n * d; ++i, offset += 4) {
    const float v = std::bit_cast<float>(get_u32(bytes, offset));
    if (!std::isfinite(v)) throw FormatError("non-finite feature value", offset);
    features.data()[i] = static_cast<double>(v);
  }
  std::vector<ClassIndex> labels(n);
  for (std::uint64_t i = 0; i < n; ++i, offset += 4) {
    labels[i] = get_u32(bytes, offset);
    if (labels[i] >= k) {
      throw FormatError("label " + std::to_string(labels[i]) + " at index " +
                            std::to_string(i) + " is >= k = " + std::to_string(k),
                        offset);
    }
  }
  std::optional<std::vector<std::uint32_t>> groups;
  if (grouped) {
    groups.emplace(n);
    for (std::uint64_t i = 0; i < n; ++i, offset += 4) (*groups)[i] = get_u32(bytes, offset);
  }
  return {std::move(features), std::move(labels), k, std::move(groups)};
}

void write_embeddings(const LabeledEmbeddings& data, const std::filesystem::path& path) {
  const auto bytes = encode_embeddings(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

LabeledEmbeddings read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(slurp(path));
}

void write_embeddings_csv(const LabeledEmbeddings& data, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "label,group";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels()[i] << ',';
    if (data.group_ids()) out << (*data.group_ids())[i];
    for (double v : data.row(i)) out << ',' << v;
    out << '\n';
  }
  spit(path, out.str());
}

LabeledEmbeddings read_embeddings_csv(const std::filesystem::path& path,
                                      std::optional<std::uint32_t> num_classes) {
  std::istringstream in(slurp_text(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file", 1);
  std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3 || line.rfind("label,group,", 0) != 0) {
    throw FormatError("CSV header must be label,group,f0,...", 1);
  }
  const std::size_t d = columns - 2;

  std::vector<ClassIndex> labels;
  std::vector<std::uint32_t> groups;
  std::vector<double> values;
  std::optional<bool> grouped;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != columns) throw FormatError("wrong number of CSV fields", line_no);
    try {
      labels.push_back(static_cast<ClassIndex>(std::stoul(fields[0])));
      const bool has_group = !fields[1].empty();
      if (grouped && *grouped != has_group) {
        throw FormatError("group column must be filled on all rows or none", line_no);
      }
      grouped = has_group;
      if (has_group) groups.push_back(static_cast<std::uint32_t>(std::stoul(fields[1])));
      for (std::size_t j = 0; j < d; ++j) values.push_back(std::stod(fields[2 + j]));
    } catch (const std::logic_error&) {
      throw FormatError("unparsable CSV number", line_no);
    }
  }
  if (labels.empty()) throw FormatError("CSV has no data rows", line_no);
  const ClassIndex max_label = *std::max_element(labels.begin(), labels.end());
  const std::uint32_t k = num_classes.value_or(std::max<std::uint32_t>(2, max_label + 1));
  if (max_label >= k) throw FormatError("label >= k in CSV", line_no);
  FeatureMatrix f(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  std::copy(values.begin(), values.end(), f.data());
  std::optional<std::vector<std::uint32_t>> g;
  if (grouped && *grouped) g = std::move(groups);
  return {std::move(f), std::move(labels), k, std::move(g)};
}

std::string format_report(const GapReport& r) {
  json j;
  j["eta"] = r.eta;
  j["trials"] = r.trials;
  j["n_train"] = r.n_train;
  j["num_classes"] = r.num_classes;
  j["noise_model"] = to_string(r.noise_model);
  j["bound_denominator"] = to_string(r.bound_denominator);
  j["train_acc"] = r.accuracies.train;
  j["test_acc"] = r.accuracies.test;
  j["train_noisy"] = r.accuracies.train_noisy;
  j["ntrain_noisy"] = optional_number(r.accuracies.ntrain_noisy);
  j["robustness_gap"] = r.robustness_gap;
  j["rationality_gap"] = optional_number(r.rationality_gap);
  j["memorization_gap"] = optional_number(r.memorization_gap);
  j["generalization_gap"] = r.generalization_gap;
  j["rrm_bound"] = optional_number(r.rrm_bound);
  j["cdc_nats"] = optional_number(r.cdc);
  j["cpc_nats"] = optional_number(r.cpc);
  j["thm2_bound"] = optional_number(r.thm2_bound);
  j["thm2_bound_capped"] = optional_number(r.thm2_bound_capped);
  j["base_seed"] = r.base_seed;
  json trials = json::array();
  for (const TrialSummary& t : r.per_trial) {
    trials.push_back({{"trial", t.trial_index},
                      {"seed", t.seed},
                      {"flips", t.flips},
                      {"train_noisy", t.train_noisy},
                      {"ntrain_noisy", optional_number(t.ntrain_noisy)}});
  }
  j["per_trial"] = std::move(trials);
  return j.dump(2) + "\n";
}

GapReport parse_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    GapReport r;
    r.eta = require(j, "eta").get<double>();
    r.trials = require(j, "trials").get<std::uint32_t>();
    r.n_train = require(j, "n_train").get<std::size_t>();
    r.num_classes = require(j, "num_classes").get<std::uint32_t>();
    r.noise_model = parse_noise_variant(require(j, "noise_model").get<std::string>());
    r.bound_denominator =
        parse_bound_denominator(require(j, "bound_denominator").get<std::string>());
    r.accuracies.train = require(j, "train_acc").get<double>();
    r.accuracies.test = require(j, "test_acc").get<double>();
    r.accuracies.train_noisy = require(j, "train_noisy").get<double>();
    r.accuracies.ntrain_noisy = read_optional(j, "ntrain_noisy");
    r.robustness_gap = require(j, "robustness_gap").get<double>();
    r.rationality_gap = read_optional(j, "rationality_gap");
    r.memorization_gap = read_optional(j, "memorization_gap");
    r.generalization_gap = require(j, "generalization_gap").get<double>();
    r.rrm_bound = read_optional(j, "rrm_bound");
    r.cdc = read_optional(j, "cdc_nats");
    r.cpc = read_optional(j, "cpc_nats");
    r.thm2_bound = read_optional(j, "thm2_bound");
    r.thm2_bound_capped = read_optional(j, "thm2_bound_capped");
    r.base_seed = require(j, "base_seed").get<std::uint64_t>();
    for (const json& t : require(j, "per_trial")) {
      TrialSummary s;
      s.trial_index = require(t, "trial").get<std::uint32_t>();
      s.seed = require(t, "seed").get<std::uint64_t>();
      s.flips = require(t, "flips").get<std::uint64_t>();
      s.train_noisy = require(t, "train_noisy").get<double>();
      s.ntrain_noisy = read_optional(t, "ntrain_noisy");
      r.per_trial.push_back(s);
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report field has the wrong type: ") + e.what(), 0);
  } catch (const ContractViolation& e) {
    throw FormatError(e.what(), 0);
  }
}

void write_report(const GapReport& report, const std::filesystem::path& path) {
  spit(path, format_report(report));
}

GapReport read_report(const std::filesystem::path& path) {
  return parse_report(slurp_text(path));
}

std::string summary_line(const GapReport& r) {
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string("null");
    std::ostringstream s;
    s << std::setprecision(6) << *v;
    return s.str();
  };
  std::ostringstream out;
  out << std::setprecision(6) << "train_acc=" << r.accuracies.train
      << " test_acc=" << r.accuracies.test << " train_noisy=" << r.accuracies.train_noisy
      << " ntrain_noisy=" << opt(r.accuracies.ntrain_noisy)
      << " robustness_gap=" << r.robustness_gap
      << " rationality_gap=" << opt(r.rationality_gap)
      << " memorization_gap=" << opt(r.memorization_gap)
      << " generalization_gap=" << r.generalization_gap << " rrm_bound=" << opt(r.rrm_bound)
      << " thm2_bound=" << opt(r.thm2_bound);
  return out.str();
}

void write_scenario(const ExactScenario& scenario, const std::filesystem::path& stem) {
  write_embeddings(scenario.train, std::filesystem::path(stem.string() + ".emb"));
  json j{{"trainer", to_string(scenario.trainer_kind)},
         {"constant_value", scenario.constant_value},
         {"noise_model", to_string(scenario.noise)},
         {"eta_num", scenario.eta.num},
         {"eta_den", scenario.eta.den}};
  spit(std::filesystem::path(stem.string() + ".scenario.json"), j.dump(2) + "\n");
}

ExactScenario read_scenario(const std::filesystem::path& stem) {
  LabeledEmbeddings train = read_embeddings(std::filesystem::path(stem.string() + ".emb"));
  const json j =
      json::parse(slurp_text(std::filesystem::path(stem.string() + ".scenario.json")));
  ExactScenario s{std::move(train)};
  s.trainer_kind = parse_oracle_trainer(require(j, "trainer").get<std::string>());
  s.constant_value = require(j, "constant_value").get<ClassIndex>();
  s.noise = parse_noise_variant(require(j, "noise_model").get<std::string>());
  s.eta = {require(j, "eta_num").get<std::uint32_t>(), require(j, "eta_den").get<std::uint32_t>()};
  return s;
}

PlotRow plot_row(const std::string& name, const GapReport& r) {
  if (!r.rationality_gap || !r.memorization_gap || !r.rrm_bound) {
    throw ContractViolation("report " + name + " has an undefined NTrain(eta)");
  }
  return {name,           r.generalization_gap, r.robustness_gap, *r.rationality_gap,
          *r.memorization_gap, *r.rrm_bound,    r.thm2_bound_capped};
}

std::string format_plot_csv(std::vector<PlotRow> rows, bool sort_by_generalization) {
  if (sort_by_generalization) {
    std::stable_sort(rows.begin(), rows.end(), [](const PlotRow& a, const PlotRow& b) {
      return a.generalization_gap < b.generalization_gap;
    });
  }
  std::ostringstream out;
  out << "name,generalization_gap,robustness,rationality,memorization,rrm_bound,thm2_bound\n";
  out << std::setprecision(17);
  for (const PlotRow& r : rows) {
    out << r.name << ',' << r.generalization_gap << ',' << r.robustness << ','
        << r.rationality << ',' << r.memorization << ',' << r.rrm_bound << ',';
    if (r.thm2_bound) out << *r.thm2_bound;
    out << '\n';
  }
  return out.str();
}

}  // namespace rrm
