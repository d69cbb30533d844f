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
#include <string>
#include <string_view>
#include <vector>

#include "semuq/backend.hpp"
#include "semuq/sample.hpp"

namespace semuq {

struct GatewayOptions {
  RetryPolicy retry;
  std::size_t max_in_flight = 8;
  // Reject samples that come back without token log-probabilities.
  bool require_logprobs = true;
};

/// Draws config.m samples for the context, one request per sample. The
/// result is ordered by request index and is never partial: any failed
/// request fails the whole call.
///
/// Errors: kInvalidConfig, kInvalidInput, kBackendUnavailable (retries
/// exhausted), kLogprobsMissing, kInvalidResponse.
SampleSet sample_generations(const ProbeContext& context, const SamplingConfig& config,
                             const Backend& backend, const GatewayOptions& options = {});

/// Produces exactly m yes/no probes for a report sentence. Scripted mock
/// misses and malformed generations fall back to the template probe.
std::vector<VQAProbe> generate_probes(std::string_view sentence, int m, const Backend& backend,
                                      std::size_t sentence_index = 0,
                                      const GatewayOptions& options = {});

/// Samples answers to a probe question asked about the context's image.
SampleSet answer_probe(const VQAProbe& probe, const ProbeContext& context,
                       const SamplingConfig& config, const Backend& backend,
                       const GatewayOptions& options = {});

// Fallback probe for a sentence; expected answer is yes.
VQAProbe template_probe(std::string_view sentence, std::size_t sentence_index = 0);

// Instruction sent to the backend when asking for probes.
std::string probe_generation_prompt(std::string_view sentence, int m);

// Parses a probe-generation reply (a JSON array of {question, answer}).
// Items that are not well-formed are dropped.
std::vector<VQAProbe> parse_probe_reply(std::string_view reply, std::size_t sentence_index);

// Calls backend.complete with the retry policy applied.
GenerationSample complete_with_retry(const Backend& backend, const CompletionRequest& request,
                                     const RetryPolicy& retry);

}  // namespace semuq
