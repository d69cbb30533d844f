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

#include "doctest.h"
#include "semuq/error.hpp"
#include "semuq/io.hpp"

using namespace semuq;
using nlohmann::json;

TEST_CASE("sample sets survive a JSON round trip") {
  SampleSet s;
  s.context = {"c1", "Is there a mass?", "file://x.png", {{"split", "test"}}};
  s.samples = {{"yes", {-0.1, -0.2}, FinishReason::kStop}, {"", {}, FinishReason::kError}};
  s.sampling_config.m = 2;
  const json j = s;
  CHECK(j["schema"] == "uq/v1");
  const auto back = j.get<SampleSet>();
  CHECK(json(back).dump() == j.dump());
}

TEST_CASE("required fields are enforced") {
  CHECK_THROWS_AS(json::parse(R"({"query":"q"})").get<ProbeContext>(), Error);
  CHECK_THROWS_AS(json::parse(R"({"id":"x","query":5})").get<ProbeContext>(), Error);
  CHECK_THROWS_AS(json::parse(R"({"context":{"id":"c","query":"q"},"samples":[]})").get<SampleSet>(), Error);
  CHECK_THROWS_AS(
      json::parse(R"({"prompt_id":"p","winner":{"policy_logprob":0,"reference_logprob":0,"score":0.2},
                      "loser":{"policy_logprob":0,"reference_logprob":0,"score":0.5}})")
          .get<PreferencePair>(),
      Error);
}

TEST_CASE("entropy reports mark absent estimators as null") {
  EntropyReport r;
  r.context_id = "c";
  r.m = 2;
  r.cluster_count = 2;
  r.values[0] = std::log(2.0);
  const json j = to_json(r);
  CHECK(j["values"]["discrete"] == std::log(2.0));
  CHECK(j["values"]["combined"].is_null());
  CHECK(to_json(r, true)["values"]["discrete"] == doctest::Approx(1.0));
}

TEST_CASE("enum names parse") {
  CHECK(parse_estimator("rao_blackwell") == EstimatorKind::kRaoBlackwell);
  CHECK_THROWS_AS(parse_estimator("bogus"), Error);
  CHECK(parse_reliability("medium") == Reliability::kMedium);
  CHECK(parse_finish_reason("length") == FinishReason::kLength);
}

TEST_CASE("mock fixture loading") {
  const auto mock = MockBackend::from_json(json::parse(R"({"schema":"uq/v1","responses":{
      "c1":[{"text":"yes","token_logprobs":[-0.1]},{"text":"no","token_logprobs":[-0.5]}]}})"));
  CHECK(mock.has("c1"));
  CompletionRequest req;
  req.context_id = "c1";
  req.sample_index = 3;
  CHECK(mock.complete(req).text == "no");
  CHECK_THROWS_AS(MockBackend::from_json(json::parse(R"({"responses":{"c1":[]}})")), Error);
}
