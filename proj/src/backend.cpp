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

#include "semuq/backend.hpp"

#include <cstdlib>
#include <fstream>

#include "http_util.hpp"
#include "semuq/error.hpp"
#include "semuq/io.hpp"

namespace semuq {

std::string mock_key(const CompletionRequest& request) {
  switch (request.kind) {
    case RequestKind::kSample: return request.context_id;
    case RequestKind::kProbeAnswer: return request.context_id + "|" + request.subject;
    case RequestKind::kProbeGeneration: return "probes|" + request.subject;
  }
  return request.context_id;
}

MockBackend MockBackend::from_json(const nlohmann::json& fixture) {
  if (!fixture.is_object()) {
    throw Error(ErrorKind::kInvalidInput, "mock fixture must be a JSON object");
  }
  const nlohmann::json& responses = fixture.contains("responses") ? fixture.at("responses") : fixture;
  MockBackend backend;
  for (const auto& [key, list] : responses.items()) {
    if (key == "schema") continue;
    if (!list.is_array() || list.empty()) {
      throw Error(ErrorKind::kInvalidInput, "mock fixture entry '" + key + "' must be a non-empty array");
    }
    backend.add(key, list.get<std::vector<GenerationSample>>());
  }
  return backend;
}

MockBackend MockBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open mock fixture '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, "bad mock fixture '" + path + "': " + e.what());
  }
}

void MockBackend::add(const std::string& key, std::vector<GenerationSample> responses) {
  script_[key] = std::move(responses);
}

GenerationSample MockBackend::complete(const CompletionRequest& request) const {
  const std::string key = mock_key(request);
  const auto it = script_.find(key);
  if (it == script_.end()) {
    throw Error(ErrorKind::kFixtureMiss, "no scripted response for key '" + key + "'");
  }
  const auto& list = it->second;
  GenerationSample out = list[request.sample_index % list.size()];
  if (!request.logprobs) out.token_logprobs.clear();
  return out;
}

HttpEndpoint HttpEndpoint::from_env() {
  HttpEndpoint ep;
  if (const char* base = std::getenv("UQ_API_BASE")) ep.base_url = base;
  if (const char* key = std::getenv("UQ_API_KEY")) ep.api_key = key;
  return ep;
}

nlohmann::json build_chat_request(const CompletionRequest& request, const std::string& model) {
  nlohmann::json content;
  if (request.image_ref) {
    content = nlohmann::json::array({
        {{"type", "text"}, {"text", request.prompt}},
        {{"type", "image_url"}, {"image_url", {{"url", *request.image_ref}}}},
    });
  } else {
    content = request.prompt;
  }
  return {
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"max_tokens", request.max_tokens},
      {"logprobs", request.logprobs},
  };
}

GenerationSample parse_chat_response(const nlohmann::json& response) {
  try {
    const auto& choice = response.at("choices").at(0);
    GenerationSample sample;
    const auto& content = choice.at("message").at("content");
    sample.text = content.is_null() ? std::string() : content.get<std::string>();

    const std::string finish = choice.value("finish_reason", std::string("stop"));
    if (finish == "stop") {
      sample.finish_reason = FinishReason::kStop;
    } else if (finish == "length") {
      sample.finish_reason = FinishReason::kLength;
    } else {
      sample.finish_reason = FinishReason::kError;
    }

    const auto lp = choice.find("logprobs");
    if (lp != choice.end() && lp->is_object()) {
      const auto tokens = lp->find("content");
      if (tokens != lp->end() && tokens->is_array()) {
        for (const auto& token : *tokens) {
          sample.token_logprobs.push_back(token.at("logprob").get<double>());
        }
      }
    }
    return sample;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidResponse, std::string("malformed chat response: ") + e.what());
  }
}

GenerationSample HttpBackend::complete(const CompletionRequest& request) const {
  if (endpoint_.base_url.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "no endpoint configured (set UQ_API_BASE)");
  }
  const auto response =
      detail::post_json(endpoint_.base_url, "/chat/completions", build_chat_request(request, model_),
                        endpoint_.api_key, endpoint_.timeout, ErrorKind::kBackendUnavailable);
  return parse_chat_response(response);
}

}  // namespace semuq
