// Copyright 2026 The semuq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semuq/backend.hpp"
#include "semuq/clustering.hpp"
#include "semuq/entropy.hpp"
#include "semuq/gateway.hpp"
#include "semuq/report.hpp"

namespace semuq {

struct EvalRecord {
  std::string id;
  double uncertainty = 0.0;
  bool correct = true;
  EstimatorKind estimator = EstimatorKind::kCombined;
};

bool judge_correct(std::string_view generated, std::string_view reference,
                   const EquivalenceJudge& judge);

// Probability that a random error outscores a random correct record, ties
// counting one half. Errors are the positive class. Throws kDegenerateLabels
// when either class is missing.
double auroc(std::span<const double> scores, std::span<const bool> is_error);
double auroc(std::span<const EvalRecord> records);

struct ConfidenceInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap (2.5 / 97.5) of the AUROC. Resamples holding a
/// single class are redrawn.
ConfidenceInterval bootstrap_ci(std::span<const EvalRecord> records, std::size_t n_boot,
                                std::uint64_t seed);

struct AblationGrid {
  std::vector<int> m_values;
  std::vector<int> probes_values;

  void validate() const;
};

struct AblationRow {
  std::string knob;  // "m" or "probes"
  int value = 0;
  EstimatorKind estimator = EstimatorKind::kCombined;
  std::size_t n_records = 0;
  std::optional<ConfidenceInterval> auroc;
  std::string failure;  // non-empty when auroc is absent
};

struct QaItem {
  ProbeContext context;
  std::string reference;
};

struct ReportItem {
  ProbeContext context;
  std::string report;
  std::vector<bool> sentence_correct;  // one label per segmented sentence
};

struct AblationOptions {
  SamplingConfig sampling;
  GatewayOptions gateway;
  ClusterOptions clustering;
  AssessOptions assess;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
};

// The answer a sample set commits to: the sample with the highest sequence
// log-probability (first on ties), or the first sample without likelihoods.
const GenerationSample& committed_answer(const SampleSet& samples);

/// Records for one m. The committed answer of each item is judged against
/// its reference.
std::vector<EvalRecord> evaluate_qa(std::span<const QaItem> dataset, int m,
                                    std::span<const EstimatorKind> estimators,
                                    const EquivalenceJudge& judge, const Backend& backend,
                                    const AblationOptions& options);

std::vector<AblationRow> run_m_ablation(std::span<const QaItem> dataset, std::span<const int> m_values,
                                        std::span<const EstimatorKind> estimators,
                                        const EquivalenceJudge& judge, const Backend& backend,
                                        const AblationOptions& options);

/// Sentence-level records for one probes-per-sentence value; planted errors
/// come from ReportItem::sentence_correct.
std::vector<EvalRecord> evaluate_reports(std::span<const ReportItem> dataset, int probes,
                                         std::span<const EstimatorKind> estimators,
                                         const Backend& backend, const AblationOptions& options);

std::vector<AblationRow> run_probes_ablation(std::span<const ReportItem> dataset,
                                             std::span<const int> probes_values,
                                             std::span<const EstimatorKind> estimators,
                                             const Backend& backend, const AblationOptions& options);

}  // namespace semuq
