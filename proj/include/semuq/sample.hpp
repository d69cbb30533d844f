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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semuq {

/// The input a set of generations is conditioned on: a query plus an
/// optional image reference (URI or a base64 payload tag).
struct ProbeContext {
  std::string id;
  std::string query;
  std::optional<std::string> image_ref;
  std::map<std::string, std::string> metadata;

  /// Throws kInvalidInput when id or query is empty.
  void validate() const;
};

enum class FinishReason { kStop, kLength, kError };

/// One sampled generation with its per-token natural-log probabilities.
/// An empty token_logprobs vector means the backend reported none.
struct GenerationSample {
  std::string text;
  std::vector<double> token_logprobs;
  FinishReason finish_reason = FinishReason::kStop;

  bool has_logprobs() const { return !token_logprobs.empty(); }
};

/// Sum of token log-probabilities, or their mean when length_normalized.
/// Empty when the sample carries no log-probabilities.
std::optional<double> sequence_log_prob(const GenerationSample& sample,
                                        bool length_normalized = false);

struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 0.9;
  int max_tokens = 256;
  int m = 10;

  /// Throws kInvalidConfig.
  void validate() const;
};

struct SampleSet {
  ProbeContext context;
  std::vector<GenerationSample> samples;
  SamplingConfig sampling_config;

  std::size_t m() const { return samples.size(); }
  bool has_logprobs() const;
};

enum class AnswerLabel { kYes, kNo, kUnknown };

/// A binary question derived from one report sentence. expected_answer is
/// always kYes or kNo.
struct VQAProbe {
  std::string question;
  AnswerLabel expected_answer = AnswerLabel::kYes;
  std::size_t source_sentence_index = 0;
};

const char* to_string(FinishReason reason);
const char* to_string(AnswerLabel label);

}  // namespace semuq
