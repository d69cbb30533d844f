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

#include <atomic>
#include <mutex>

#include "doctest.h"
#include "semuq/error.hpp"
#include "semuq/gateway.hpp"
#include "semuq/io.hpp"
#include "test_support.hpp"

using namespace semuq;
using semuq::testing::LocalServer;
using semuq::testing::make_sample;

namespace {

GatewayOptions fast_retry() {
  GatewayOptions o;
  o.retry.initial_backoff = std::chrono::milliseconds(1);
  return o;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kInvalidInput;
}

class FlakyBackend : public Backend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  GenerationSample complete(const CompletionRequest&) const override {
    if (calls_++ < failures_) throw TransientError("connection reset");
    return make_sample("yes", {-0.1});
  }
  int calls() const { return calls_; }

 private:
  int failures_;
  mutable std::atomic<int> calls_{0};
};

nlohmann::json chat_reply(const std::string& text, std::vector<double> lps) {
  nlohmann::json tokens = nlohmann::json::array();
  for (double lp : lps) tokens.push_back({{"token", "x"}, {"logprob", lp}});
  return {{"choices",
           {{{"index", 0},
             {"message", {{"role", "assistant"}, {"content", text}}},
             {"logprobs", {{"content", tokens}}},
             {"finish_reason", "stop"}}}}};
}

}  // namespace

TEST_CASE("mock samples come back in scripted order") {
  MockBackend mock;
  mock.add("c1", {make_sample("yes", {-0.1}), make_sample("yes", {-0.2}), make_sample("no", {-1.0})});
  SamplingConfig cfg;
  cfg.m = 3;
  const auto set = sample_generations({"c1", "Is there a mass?", std::nullopt, {}}, cfg, mock);
  REQUIRE(set.m() == 3);
  CHECK(set.samples[0].text == "yes");
  CHECK(set.samples[1].text == "yes");
  CHECK(set.samples[2].text == "no");
  CHECK(set.samples[1].token_logprobs == std::vector<double>{-0.2});
}

TEST_CASE("mock sampling is deterministic across calls and cycles past the script") {
  MockBackend mock;
  mock.add("c1", {make_sample("a", {-0.1}), make_sample("b", {-0.2})});
  SamplingConfig cfg;
  cfg.m = 7;
  const ProbeContext ctx{"c1", "q", std::nullopt, {}};
  const nlohmann::json first = sample_generations(ctx, cfg, mock);
  const nlohmann::json second = sample_generations(ctx, cfg, mock);
  CHECK(first.dump() == second.dump());
  CHECK(first["samples"][6]["text"] == "a");
}

TEST_CASE("invalid sampling config is rejected before any request") {
  MockBackend mock;
  SamplingConfig cfg;
  cfg.m = 0;
  CHECK(kind_of([&] { sample_generations({"c", "q", std::nullopt, {}}, cfg, mock); }) ==
        ErrorKind::kInvalidConfig);
  cfg.m = 1;
  cfg.top_p = 1.5;
  CHECK(kind_of([&] { sample_generations({"c", "q", std::nullopt, {}}, cfg, mock); }) ==
        ErrorKind::kInvalidConfig);
  cfg.top_p = 0.9;
  cfg.temperature = 0.0;
  CHECK(kind_of([&] { sample_generations({"c", "q", std::nullopt, {}}, cfg, mock); }) ==
        ErrorKind::kInvalidConfig);
}

TEST_CASE("invalid log-probabilities are rejected with LogprobsMissing") {
  MockBackend mock;
  mock.add("pos", {make_sample("yes", {0.3})});
  mock.add("none", {make_sample("yes", {})});
  SamplingConfig cfg;
  cfg.m = 2;
  CHECK(kind_of([&] { sample_generations({"pos", "q", std::nullopt, {}}, cfg, mock); }) ==
        ErrorKind::kLogprobsMissing);
  CHECK(kind_of([&] { sample_generations({"none", "q", std::nullopt, {}}, cfg, mock); }) ==
        ErrorKind::kLogprobsMissing);

  GatewayOptions lenient;
  lenient.require_logprobs = false;
  CHECK(sample_generations({"none", "q", std::nullopt, {}}, cfg, mock, lenient).m() == 2);
}

TEST_CASE("transient failures are retried a bounded number of times") {
  SamplingConfig cfg;
  cfg.m = 1;
  FlakyBackend recovers(2);
  CHECK(sample_generations({"c", "q", std::nullopt, {}}, cfg, recovers, fast_retry()).m() == 1);
  CHECK(recovers.calls() == 3);

  FlakyBackend never(100);
  CHECK(kind_of([&] { sample_generations({"c", "q", std::nullopt, {}}, cfg, never, fast_retry()); }) ==
        ErrorKind::kBackendUnavailable);
  CHECK(never.calls() == 3);
}

TEST_CASE("default sampling parameters go out on the wire") {
  std::mutex mu;
  std::vector<nlohmann::json> bodies;
  std::string auth;
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      bodies.push_back(nlohmann::json::parse(req.body));
      auth = req.get_header_value("Authorization");
      res.set_content(chat_reply("Yes.", {-0.05, -0.01}).dump(), "application/json");
    });
  });
  HttpBackend backend({server.base_url() + "/v1", "secret", std::chrono::milliseconds(5000)}, "med-model");
  SamplingConfig cfg;
  cfg.m = 5;
  const auto set = sample_generations({"c1", "Is there a mass?", "file://img.png", {}}, cfg, backend);

  REQUIRE(set.m() == 5);
  for (const auto& s : set.samples) CHECK(s.token_logprobs == std::vector<double>{-0.05, -0.01});
  REQUIRE(bodies.size() == 5);
  const auto& body = bodies[0];
  CHECK(body["temperature"] == 1.0);
  CHECK(body["top_p"] == 0.9);
  CHECK(body["logprobs"] == true);
  CHECK(body["model"] == "med-model");
  CHECK(body["messages"][0]["content"][0]["text"] == "Is there a mass?");
  CHECK(body["messages"][0]["content"][1]["image_url"]["url"] == "file://img.png");
  CHECK(auth == "Bearer secret");
}

TEST_CASE("HTTP 5xx is retried and 4xx is not") {
  std::atomic<int> hits{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      if (hits++ == 0) {
        res.status = 503;
        return;
      }
      res.set_content(chat_reply("no", {-0.2}).dump(), "application/json");
    });
    s.Post("/bad/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 400;
    });
  });
  SamplingConfig cfg;
  cfg.m = 1;
  HttpBackend ok({server.base_url(), "", std::chrono::milliseconds(5000)}, "m");
  CHECK(sample_generations({"c", "q", std::nullopt, {}}, cfg, ok, fast_retry()).samples[0].text == "no");
  CHECK(hits == 2);

  hits = 0;
  HttpBackend bad({server.base_url() + "/bad", "", std::chrono::milliseconds(5000)}, "m");
  CHECK(kind_of([&] { sample_generations({"c", "q", std::nullopt, {}}, cfg, bad, fast_retry()); }) ==
        ErrorKind::kBackendUnavailable);
  CHECK(hits == 1);
}

TEST_CASE("unreachable endpoint ends in BackendUnavailable") {
  HttpBackend backend({"http://127.0.0.1:1", "", std::chrono::milliseconds(500)}, "m");
  SamplingConfig cfg;
  cfg.m = 2;
  const VQAProbe probe{"Is there a mass?", AnswerLabel::kYes, 0};
  CHECK(kind_of([&] { answer_probe(probe, {"c", "q", std::nullopt, {}}, cfg, backend, fast_retry()); }) ==
        ErrorKind::kBackendUnavailable);
}

TEST_CASE("parse_chat_response handles missing logprobs and malformed payloads") {
  auto reply = chat_reply("Yes", {});
  reply["choices"][0]["logprobs"] = nullptr;
  const auto s = parse_chat_response(reply);
  CHECK(s.text == "Yes");
  CHECK_FALSE(s.has_logprobs());
  CHECK(kind_of([] { parse_chat_response(nlohmann::json{{"choices", nlohmann::json::array()}}); }) ==
        ErrorKind::kInvalidResponse);
}

TEST_CASE("generate_probes falls back to the template with the mock") {
  MockBackend mock;
  const auto probes = generate_probes("Mild cardiomegaly.", 2, mock);
  REQUIRE(probes.size() == 2);
  for (const auto& p : probes) {
    CHECK(p.question == "According to the image, is the following statement true: Mild cardiomegaly?");
    CHECK(p.expected_answer == AnswerLabel::kYes);
  }
  CHECK(kind_of([&] { generate_probes("", 2, mock); }) == ErrorKind::kEmptySentence);
}

TEST_CASE("generate_probes parses a scripted probe reply") {
  MockBackend mock;
  const std::string sentence = "The patient has a mass in the right lung.";
  mock.add("probes|" + sentence,
           {make_sample(R"(Here you go: [{"question": "Is there a mass in the right lung?", "answer": "Yes"},
                           {"question": "Is the left lung affected?", "answer": "no"},
                           {"question": "", "answer": "yes"}])",
                        {})});
  const auto probes = generate_probes(sentence, 3, mock, 4);
  REQUIRE(probes.size() == 3);
  CHECK(probes[0].question == "Is there a mass in the right lung?");
  CHECK(probes[0].expected_answer == AnswerLabel::kYes);
  CHECK(probes[1].expected_answer == AnswerLabel::kNo);
  CHECK(probes[2].question.rfind("According to the image", 0) == 0);  // padded
  CHECK(probes[0].source_sentence_index == 4);

  mock.add("probes|Broken.", {make_sample("I cannot answer that.", {})});
  CHECK(generate_probes("Broken.", 1, mock)[0].question.rfind("According to the image", 0) == 0);
}

TEST_CASE("answer_probe substitutes the question as the query") {
  MockBackend mock;
  const VQAProbe probe{"Is there a mass?", AnswerLabel::kYes, 0};
  mock.add("ctx|Is there a mass?", {make_sample("Yes.", {-0.1}), make_sample("Yes.", {-0.1}),
                                    make_sample("No", {-2.0})});
  SamplingConfig cfg;
  cfg.m = 3;
  const auto set = answer_probe(probe, {"ctx", "Describe the image", std::nullopt, {}}, cfg, mock);
  REQUIRE(set.m() == 3);
  CHECK(set.context.query == "Is there a mass?");
  CHECK(set.samples[2].text == "No");
}

TEST_CASE("concurrent requests keep request order") {
  class SlowBackend : public Backend {
   public:
    GenerationSample complete(const CompletionRequest& req) const override {
      std::this_thread::sleep_for(std::chrono::milliseconds((7 * req.sample_index) % 5));
      return make_sample("s" + std::to_string(req.sample_index), {-0.1});
    }
  } backend;
  SamplingConfig cfg;
  cfg.m = 20;
  const auto set = sample_generations({"c", "q", std::nullopt, {}}, cfg, backend);
  for (std::size_t i = 0; i < set.samples.size(); ++i) CHECK(set.samples[i].text == "s" + std::to_string(i));
}
