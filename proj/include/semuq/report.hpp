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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semuq/backend.hpp"
#include "semuq/clustering.hpp"
#include "semuq/entropy.hpp"
#include "semuq/gateway.hpp"
#include "semuq/sample.hpp"
#include "semuq/text.hpp"

namespace semuq {

struct SentenceSpan {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the report, [begin, end)
  std::size_t end = 0;
};

struct ReportDecomposition {
  std::string report_id;
  std::vector<SentenceSpan> sentences;
};

/// Splits on '.', '?', '!', ';' and blank lines. A period does not end a
/// sentence inside a decimal number, after a guarded abbreviation (Dr.,
/// e.g., vs., ...) or after "No." followed by a digit. Spans are trimmed.
ReportDecomposition segment_report(std::string_view report, std::string report_id = {});

struct ProbeAnswers {
  VQAProbe probe;
  SampleSet answers;
};

/// Answers split into C1 (agrees with the probe's expected answer) and C0
/// (everything else, unknown included).
struct BinaryClustering {
  std::optional<double> c0_log_mass;  // empty when C0 has no answers
  std::optional<double> c1_log_mass;
  std::vector<DedupMember> c0_dedup;
  std::vector<DedupMember> c1_dedup;
  // assignment[p][s] is 0 or 1 for sample s of probe p.
  std::vector<std::vector<int>> assignment;

  double c0_within() const;
  double c1_within() const;
};

BinaryClustering binary_cluster(std::span<const ProbeAnswers> probe_answers,
                                bool merge_duplicates = true);

/// within_only: pbar0 H0 + pbar1 H1 over normalized masses. combined adds
/// the binary entropy of (pbar0, pbar1). An absent cluster has zero weight.
double sentence_entropy(std::optional<double> c0_log_mass, std::optional<double> c1_log_mass,
                        double c0_within, double c1_within, EstimatorKind kind);
double sentence_entropy(const BinaryClustering& clusters, EstimatorKind kind);

enum class Reliability { kHigh, kMedium, kLow };
const char* to_string(Reliability level);

struct ReliabilityThresholds {
  double theta_high = 0.25;
  double theta_low = 0.55;

  void validate() const;  // kInvalidThresholds
};

Reliability reliability_index(double entropy, const ReliabilityThresholds& thresholds = {});

struct SentenceAssessment {
  std::size_t sentence_index = 0;
  std::vector<ProbeAnswers> probes;  // probes that were answered
  std::size_t failed_probes = 0;
  BinaryClustering clusters;
  std::optional<double> entropy;  // empty when no probe could be answered
  Reliability reliability = Reliability::kLow;
};

struct AssessOptions {
  int probes_per_sentence = 5;
  SamplingConfig answer_config{1.0, 0.9, 32, 3};
  EstimatorKind estimator = EstimatorKind::kCombined;
  ReliabilityThresholds thresholds;
  GatewayOptions gateway;
};

/// segment -> probes -> answers -> binary clustering -> entropy -> level for
/// every sentence, in sentence order. A probe that cannot be answered is
/// counted in failed_probes and skipped; a sentence with no answered probe
/// gets no entropy and is rated low. Throws kBackendUnavailable only when
/// no probe in the whole report could be answered.
std::vector<SentenceAssessment> assess_report(const ReportDecomposition& doc,
                                              const ProbeContext& context,
                                              const Backend& backend,
                                              const AssessOptions& options = {});
std::vector<SentenceAssessment> assess_report(std::string_view report, const ProbeContext& context,
                                              const Backend& backend,
                                              const AssessOptions& options = {});

struct LabeledEntropy {
  double entropy = 0.0;
  Reliability level = Reliability::kHigh;
};

struct ThresholdFit {
  ReliabilityThresholds thresholds;
  double balanced_accuracy = 0.0;
};

/// Picks cut points maximizing the mean per-level recall (levels absent from
/// the data are ignored). Ties go to the smallest thresholds.
ThresholdFit calibrate_thresholds(std::span<const LabeledEntropy> labeled);

}  // namespace semuq
