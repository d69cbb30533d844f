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

#include "semuq/io.hpp"

#include <cmath>

#include "semuq/error.hpp"
#include "semuq/log_math.hpp"

namespace semuq {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) throw Error(ErrorKind::kInvalidInput, std::string("missing field '") + field + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kInvalidInput, std::string("field '") + field + "' has the wrong type");
  }
}

json optional_number(const std::optional<double>& v, double scale = 1.0) {
  return v ? json(*v * scale) : json(nullptr);
}

}  // namespace

void to_json(json& j, const ProbeContext& c) {
  j = {{"id", c.id}, {"query", c.query}};
  if (c.image_ref) j["image_ref"] = *c.image_ref;
  if (!c.metadata.empty()) j["metadata"] = c.metadata;
}

void from_json(const json& j, ProbeContext& c) {
  c.id = required<std::string>(j, "id");
  c.query = required<std::string>(j, "query");
  if (j.contains("image_ref") && !j.at("image_ref").is_null()) {
    c.image_ref = required<std::string>(j, "image_ref");
  }
  if (j.contains("metadata")) c.metadata = required<std::map<std::string, std::string>>(j, "metadata");
}

void to_json(json& j, const GenerationSample& s) {
  j = {{"text", s.text}, {"token_logprobs", s.token_logprobs}, {"finish_reason", to_string(s.finish_reason)}};
}

void from_json(const json& j, GenerationSample& s) {
  s.text = required<std::string>(j, "text");
  s.token_logprobs = j.contains("token_logprobs") && !j.at("token_logprobs").is_null()
                         ? required<std::vector<double>>(j, "token_logprobs")
                         : std::vector<double>{};
  s.finish_reason = parse_finish_reason(j.value("finish_reason", std::string("stop")));
}

void to_json(json& j, const SamplingConfig& c) {
  j = {{"temperature", c.temperature}, {"top_p", c.top_p}, {"max_tokens", c.max_tokens}, {"m", c.m}};
}

void from_json(const json& j, SamplingConfig& c) {
  c = SamplingConfig{};
  c.temperature = j.value("temperature", c.temperature);
  c.top_p = j.value("top_p", c.top_p);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.m = j.value("m", c.m);
}

void to_json(json& j, const SampleSet& s) {
  j = {{"schema", kSchema}, {"context", s.context}, {"sampling_config", s.sampling_config},
       {"samples", s.samples}};
}

void from_json(const json& j, SampleSet& s) {
  s.context = required<ProbeContext>(j, "context");
  s.samples = required<std::vector<GenerationSample>>(j, "samples");
  if (j.contains("sampling_config")) {
    s.sampling_config = required<SamplingConfig>(j, "sampling_config");
  } else {
    s.sampling_config.m = static_cast<int>(s.samples.size());
  }
  if (s.samples.empty()) throw Error(ErrorKind::kEmptySampleSet, "sample set has no samples");
}

void to_json(json& j, const ScoredGeneration& g) {
  j = {{"text", g.text}, {"policy_logprob", g.policy_logprob},
       {"reference_logprob", g.reference_logprob}, {"score", g.score}};
}

void from_json(const json& j, ScoredGeneration& g) {
  g.text = j.value("text", std::string());
  g.policy_logprob = required<double>(j, "policy_logprob");
  g.reference_logprob = required<double>(j, "reference_logprob");
  g.score = j.contains("score") ? required<double>(j, "score") : 0.0;
  if (!std::isfinite(g.policy_logprob) || !std::isfinite(g.reference_logprob)) {
    throw Error(ErrorKind::kInvalidInput, "log-probabilities must be finite");
  }
  if (!(g.score >= 0.0 && g.score <= 1.0)) throw Error(ErrorKind::kInvalidInput, "score must be in [0, 1]");
}

void to_json(json& j, const PreferencePair& p) {
  j = {{"schema", kSchema}, {"prompt_id", p.prompt_id}, {"winner", p.winner}, {"loser", p.loser},
       {"score_gap", p.score_gap}};
}

void from_json(const json& j, PreferencePair& p) {
  p.prompt_id = required<std::string>(j, "prompt_id");
  p.winner = required<ScoredGeneration>(j, "winner");
  p.loser = required<ScoredGeneration>(j, "loser");
  p.score_gap = p.winner.score - p.loser.score;
  p.validate();
}

void to_json(json& j, const EvalRecord& r) {
  j = {{"schema", kSchema}, {"id", r.id}, {"uncertainty", r.uncertainty}, {"correct", r.correct},
       {"estimator", to_string(r.estimator)}};
}

void from_json(const json& j, EvalRecord& r) {
  r.id = required<std::string>(j, "id");
  r.uncertainty = required<double>(j, "uncertainty");
  r.correct = required<bool>(j, "correct");
  r.estimator = parse_estimator(j.value("estimator", std::string("combined")));
  if (!std::isfinite(r.uncertainty) || r.uncertainty < 0.0) {
    throw Error(ErrorKind::kInvalidInput, "uncertainty must be finite and >= 0");
  }
}

json to_json(const EntropyReport& report, bool bits) {
  const double scale = bits ? kNatsToBits : 1.0;
  json values = json::object();
  for (auto kind : kAllEstimators) values[to_string(kind)] = optional_number(report.value(kind), scale);
  json within = json::array();
  for (const auto& [index, h] : report.per_cluster_within) {
    within.push_back({{"cluster", index}, {"entropy", h * scale}});
  }
  return {{"schema", kSchema},
          {"context_id", report.context_id},
          {"m", report.m},
          {"cluster_count", report.cluster_count},
          {"unit", bits ? "bits" : "nats"},
          {"values", values},
          {"per_cluster_within", within}};
}

json to_json(const SentenceAssessment& a, const ReportDecomposition& doc) {
  const auto& span = doc.sentences.at(a.sentence_index);
  json probes = json::array();
  for (std::size_t p = 0; p < a.probes.size(); ++p) {
    const auto& pa = a.probes[p];
    json answers = json::array();
    for (const auto& s : pa.answers.samples) answers.push_back(s.text);
    probes.push_back({{"question", pa.probe.question},
                      {"expected", to_string(pa.probe.expected_answer)},
                      {"answers", answers},
                      {"c", a.clusters.assignment.at(p)}});
  }
  return {{"index", a.sentence_index},
          {"text", span.text},
          {"begin", span.begin},
          {"end", span.end},
          {"entropy_nats", optional_number(a.entropy)},
          {"reliability", to_string(a.reliability)},
          {"c0_log_mass", optional_number(a.clusters.c0_log_mass)},
          {"c1_log_mass", optional_number(a.clusters.c1_log_mass)},
          {"failed_probes", a.failed_probes},
          {"probes", probes}};
}

json report_to_json(const std::string& report_id, const ReportDecomposition& doc,
                    const std::vector<SentenceAssessment>& assessments) {
  json sentences = json::array();
  for (const auto& a : assessments) sentences.push_back(to_json(a, doc));
  return {{"schema", kSchema}, {"report_id", report_id}, {"sentences", sentences}};
}

EstimatorKind parse_estimator(const std::string& name) {
  for (auto kind : kAllEstimators) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown estimator '" + name + "'");
}

Reliability parse_reliability(const std::string& name) {
  for (auto level : {Reliability::kHigh, Reliability::kMedium, Reliability::kLow}) {
    if (name == to_string(level)) return level;
  }
  throw Error(ErrorKind::kInvalidInput, "unknown reliability level '" + name + "'");
}

FinishReason parse_finish_reason(const std::string& name) {
  for (auto reason : {FinishReason::kStop, FinishReason::kLength, FinishReason::kError}) {
    if (name == to_string(reason)) return reason;
  }
  throw Error(ErrorKind::kInvalidInput, "unknown finish_reason '" + name + "'");
}

}  // namespace semuq
