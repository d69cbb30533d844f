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

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semuq/sample.hpp"

namespace semuq {

enum class RequestKind { kSample, kProbeGeneration, kProbeAnswer };

/// One completion request. `subject` is the text the request is about; with
/// context_id and sample_index it keys scripted backends. `prompt` is the user message sent on the wire.
struct CompletionRequest {
  RequestKind kind = RequestKind::kSample;
  std::string context_id;
  std::string subject;
  std::string prompt;
  std::optional<std::string> image_ref;
  std::size_t sample_index = 0;
  double temperature = 1.0;
  double top_p = 0.9;
  int max_tokens = 256;
  bool logprobs = true;
};

/// Backends must be safe to call from several threads at once. Retryable
/// failures are reported by throwing TransientError; anything else is fatal
/// for that request.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationSample complete(const CompletionRequest& request) const = 0;
};

// Mock lookup key: context id for plain sampling, "<context id>|<question>"
// for probe answers, "probes|<sentence>" for probe generation.
std::string mock_key(const CompletionRequest& request);

/// Deterministic scripted backend. Each key maps to a list of responses;
/// sample index i receives entry i modulo the list length. An unknown key
/// throws kFixtureMiss.
class MockBackend : public Backend {
 public:
  using Script = std::map<std::string, std::vector<GenerationSample>>;

  MockBackend() = default;
  explicit MockBackend(Script script) : script_(std::move(script)) {}

  static MockBackend from_json(const nlohmann::json& fixture);
  static MockBackend from_file(const std::string& path);

  void add(const std::string& key, std::vector<GenerationSample> responses);
  bool has(const std::string& key) const { return script_.count(key) != 0; }

  GenerationSample complete(const CompletionRequest& request) const override;

 private:
  Script script_;
};

struct HttpEndpoint {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;
  std::chrono::milliseconds timeout{60000};

  /// Fills unset fields from UQ_API_BASE / UQ_API_KEY.
  static HttpEndpoint from_env();
};

/// Chat/completions client for OpenAI-compatible servers. One request per
/// sample; log-probabilities requested through the `logprobs` flag.
class HttpBackend : public Backend {
 public:
  HttpBackend(HttpEndpoint endpoint, std::string model)
      : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

  GenerationSample complete(const CompletionRequest& request) const override;

  const std::string& model() const { return model_; }

 private:
  HttpEndpoint endpoint_;
  std::string model_;
};

nlohmann::json build_chat_request(const CompletionRequest& request, const std::string& model);

/// Parses choices[0] of a chat/completions response. Throws
/// kInvalidResponse for a malformed payload.
GenerationSample parse_chat_response(const nlohmann::json& response);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
};

}  // namespace semuq
