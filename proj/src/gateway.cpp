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

#include "semuq/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "semuq/error.hpp"
#include "semuq/parallel.hpp"
#include "semuq/text.hpp"

namespace semuq {

void ProbeContext::validate() const {
  if (id.empty()) throw Error(ErrorKind::kInvalidInput, "context id must be non-empty");
  if (query.empty()) throw Error(ErrorKind::kInvalidInput, "context '" + id + "' has an empty query");
}

void SamplingConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::kInvalidConfig, "temperature must be > 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "top_p must be in (0, 1]");
  }
  if (max_tokens < 1) throw Error(ErrorKind::kInvalidConfig, "max_tokens must be >= 1");
  if (m < 1) throw Error(ErrorKind::kInvalidConfig, "m must be >= 1");
}

std::optional<double> sequence_log_prob(const GenerationSample& sample, bool length_normalized) {
  if (!sample.has_logprobs()) return std::nullopt;
  const double sum =
      std::accumulate(sample.token_logprobs.begin(), sample.token_logprobs.end(), 0.0);
  return length_normalized ? sum / static_cast<double>(sample.token_logprobs.size()) : sum;
}

bool SampleSet::has_logprobs() const {
  return !samples.empty() &&
         std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.has_logprobs(); });
}

const char* to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kError: return "error";
  }
  return "error";
}

const char* to_string(AnswerLabel label) {
  switch (label) {
    case AnswerLabel::kYes: return "yes";
    case AnswerLabel::kNo: return "no";
    case AnswerLabel::kUnknown: return "unknown";
  }
  return "unknown";
}

GenerationSample complete_with_retry(const Backend& backend, const CompletionRequest& request,
                                     const RetryPolicy& retry) {
  const int attempts = std::max(retry.attempts, 1);
  auto backoff = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    try {
      return backend.complete(request);
    } catch (const TransientError& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorKind::kBackendUnavailable,
              std::to_string(attempts) + " attempts failed; last error: " + last_error);
}

namespace {

void check_sample(const GenerationSample& sample, bool require_logprobs) {
  for (double lp : sample.token_logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error(ErrorKind::kLogprobsMissing, "backend returned an invalid token log-probability");
    }
  }
  if (sample.finish_reason == FinishReason::kError) return;
  if (sample.text.empty()) throw Error(ErrorKind::kInvalidResponse, "backend returned empty text");
  if (require_logprobs && !sample.has_logprobs()) {
    throw Error(ErrorKind::kLogprobsMissing, "backend returned text without log-probabilities");
  }
}

SampleSet draw(const ProbeContext& context, const SamplingConfig& config, const Backend& backend,
               const GatewayOptions& options, RequestKind kind, const std::string& subject) {
  config.validate();
  context.validate();

  SampleSet out{context, std::vector<GenerationSample>(static_cast<std::size_t>(config.m)), config};
  parallel_for(out.samples.size(), options.max_in_flight, [&](std::size_t i) {
    CompletionRequest req;
    req.kind = kind;
    req.context_id = context.id;
    req.subject = subject;
    req.prompt = subject;
    req.image_ref = context.image_ref;
    req.sample_index = i;
    req.temperature = config.temperature;
    req.top_p = config.top_p;
    req.max_tokens = config.max_tokens;
    req.logprobs = true;
    GenerationSample sample = complete_with_retry(backend, req, options.retry);
    check_sample(sample, options.require_logprobs);
    out.samples[i] = std::move(sample);
  });
  return out;
}

}  // namespace

SampleSet sample_generations(const ProbeContext& context, const SamplingConfig& config,
                             const Backend& backend, const GatewayOptions& options) {
  return draw(context, config, backend, options, RequestKind::kSample, context.query);
}

SampleSet answer_probe(const VQAProbe& probe, const ProbeContext& context,
                       const SamplingConfig& config, const Backend& backend,
                       const GatewayOptions& options) {
  if (probe.question.empty()) throw Error(ErrorKind::kInvalidInput, "probe question is empty");
  ProbeContext asked = context;
  asked.query = probe.question;
  return draw(asked, config, backend, options, RequestKind::kProbeAnswer, probe.question);
}

VQAProbe template_probe(std::string_view sentence, std::size_t sentence_index) {
  std::string_view body = sentence;
  while (!body.empty() && (body.back() == '.' || body.back() == ';' || body.back() == ' ')) {
    body.remove_suffix(1);
  }
  return {"According to the image, is the following statement true: " + std::string(body) + "?",
          AnswerLabel::kYes, sentence_index};
}

std::string probe_generation_prompt(std::string_view sentence, int m) {
  return "Write " + std::to_string(m) +
         " yes/no questions that check the factual content of the following radiology report "
         "sentence against the image. Reply with a JSON array of objects with fields "
         "\"question\" and \"answer\", where answer is \"yes\" or \"no\" as implied by the "
         "sentence.\nSentence: " +
         std::string(sentence);
}

std::vector<VQAProbe> parse_probe_reply(std::string_view reply, std::size_t sentence_index) {
  std::vector<VQAProbe> probes;
  const auto open = reply.find('[');
  const auto close = reply.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return probes;
  }
  const auto parsed =
      nlohmann::json::parse(reply.substr(open, close - open + 1), nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_array()) return probes;
  for (const auto& item : parsed) {
    if (!item.is_object()) continue;
    const auto q = item.find("question");
    const auto a = item.find("answer");
    if (q == item.end() || a == item.end() || !q->is_string() || !a->is_string()) continue;
    const auto question = q->get<std::string>();
    const AnswerLabel expected = normalize_answer(a->get<std::string>());
    if (question.empty() || expected == AnswerLabel::kUnknown) continue;
    probes.push_back({question, expected, sentence_index});
  }
  return probes;
}

std::vector<VQAProbe> generate_probes(std::string_view sentence, int m, const Backend& backend,
                                      std::size_t sentence_index, const GatewayOptions& options) {
  if (sentence.empty()) throw Error(ErrorKind::kEmptySentence, "cannot probe an empty sentence");
  if (m < 1) throw Error(ErrorKind::kInvalidConfig, "probe count must be >= 1");

  CompletionRequest req;
  req.kind = RequestKind::kProbeGeneration;
  req.subject = std::string(sentence);
  req.prompt = probe_generation_prompt(sentence, m);
  req.temperature = 0.0;
  req.top_p = 1.0;
  req.max_tokens = 512;
  req.logprobs = false;

  std::vector<VQAProbe> probes;
  try {
    probes = parse_probe_reply(complete_with_retry(backend, req, options.retry).text, sentence_index);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kFixtureMiss && e.kind() != ErrorKind::kInvalidResponse) throw;
  }
  if (probes.size() > static_cast<std::size_t>(m)) probes.resize(static_cast<std::size_t>(m));
  while (probes.size() < static_cast<std::size_t>(m)) {
    probes.push_back(template_probe(sentence, sentence_index));
  }
  return probes;
}

}  // namespace semuq
