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

// JSON (de)serialization for the file formats the CLI reads and writes.
// Every top-level record carries "schema": "uq/v1".

#include <string>

#include "json.hpp"
#include "semuq/clustering.hpp"
#include "semuq/dpo.hpp"
#include "semuq/entropy.hpp"
#include "semuq/eval.hpp"
#include "semuq/report.hpp"
#include "semuq/sample.hpp"

namespace semuq {

inline constexpr const char* kSchema = "uq/v1";

void to_json(nlohmann::json& j, const ProbeContext& c);
void from_json(const nlohmann::json& j, ProbeContext& c);
void to_json(nlohmann::json& j, const GenerationSample& s);
void from_json(const nlohmann::json& j, GenerationSample& s);
void to_json(nlohmann::json& j, const SamplingConfig& c);
void from_json(const nlohmann::json& j, SamplingConfig& c);
void to_json(nlohmann::json& j, const SampleSet& s);
void from_json(const nlohmann::json& j, SampleSet& s);
void to_json(nlohmann::json& j, const ScoredGeneration& g);
void from_json(const nlohmann::json& j, ScoredGeneration& g);
void to_json(nlohmann::json& j, const PreferencePair& p);
void from_json(const nlohmann::json& j, PreferencePair& p);
void to_json(nlohmann::json& j, const EvalRecord& r);
void from_json(const nlohmann::json& j, EvalRecord& r);

nlohmann::json to_json(const EntropyReport& report, bool bits = false);
nlohmann::json to_json(const SentenceAssessment& a, const ReportDecomposition& doc);
nlohmann::json report_to_json(const std::string& report_id, const ReportDecomposition& doc,
                              const std::vector<SentenceAssessment>& assessments);

EstimatorKind parse_estimator(const std::string& name);
Reliability parse_reliability(const std::string& name);
FinishReason parse_finish_reason(const std::string& name);

}  // namespace semuq
