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
#include "semuq/eval.hpp"
#include "test_support.hpp"

using namespace semuq;
using namespace semuq::testing;

namespace {

std::vector<EvalRecord> records_of(const std::vector<double>& scores, const std::vector<bool>& errors) {
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({"r" + std::to_string(i), scores[i], !errors[i], EstimatorKind::kCombined});
  }
  return out;
}

}  // namespace

TEST_CASE("judge_correct") {
  BinaryRuleJudge binary;
  NormalizedExactJudge exact;
  CHECK(judge_correct("yes", "Yes.", binary));
  CHECK_FALSE(judge_correct("no", "yes", binary));
  CHECK(judge_correct("Left lower lobe.", "left lower lobe", exact));
  CHECK_FALSE(judge_correct("left lobe", "left lower lobe", exact));
  CHECK_THROWS_AS(judge_correct("x", "", exact), Error);
}

TEST_CASE("auroc examples") {
  CHECK(auroc(records_of({0.9, 0.8, 0.1, 0.2}, {true, true, false, false})) == 1.0);
  CHECK(auroc(records_of({0.5, 0.5, 0.5, 0.5}, {true, false, true, false})) == 0.5);
  CHECK(auroc(records_of({0.9, 0.8, 0.7, 0.6}, {true, false, true, false})) == 0.75);
  try {
    auroc(records_of({0.1, 0.2}, {false, false}));
    FAIL("expected DegenerateLabels");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateLabels);
  }
}

TEST_CASE("auroc equals the pairwise oracle, is rank-invariant and flips with labels") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(2, 200);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size(rng);
    const int levels = trial % 3 == 0 ? 3 : 1000;  // tie-heavy every third case
    std::uniform_int_distribution<int> level(0, levels - 1);
    std::vector<double> scores(n);
    std::vector<bool> errors(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = level(rng) / static_cast<double>(levels);
      errors[i] = rng() % 2;
    }
    errors[0] = true;
    errors[1] = false;
    const auto recs = records_of(scores, errors);
    const double a = auroc(recs);
    CHECK(a == brute_force_auroc(scores, errors));

    std::vector<double> transformed;
    for (double s : scores) transformed.push_back(std::exp(3 * s) - 7);
    CHECK(auroc(records_of(transformed, errors)) == a);

    std::vector<bool> flipped;
    for (bool e : errors) flipped.push_back(!e);
    CHECK(auroc(records_of(scores, flipped)) == doctest::Approx(1.0 - a).epsilon(1e-15));
  }
}

TEST_CASE("bootstrap CI is deterministic under a fixed seed") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> scores;
  std::vector<bool> errors;
  for (int i = 0; i < 120; ++i) {
    errors.push_back(i % 3 == 0);
    scores.push_back(noise(rng) + (errors.back() ? 1.0 : 0.0));
  }
  const auto recs = records_of(scores, errors);
  const auto a = bootstrap_ci(recs, 500, 42);
  const auto b = bootstrap_ci(recs, 500, 42);
  CHECK(a.point == b.point);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo <= a.point);
  CHECK(a.point <= a.hi);
  CHECK(bootstrap_ci(recs, 500, 43).lo != a.lo);
  CHECK_THROWS_AS(bootstrap_ci(recs, 50, 1), Error);
}

TEST_CASE("bootstrap CI collapses on perfectly separated data") {
  const auto recs = records_of({0.9, 0.8, 0.7, 0.1, 0.2, 0.3}, {true, true, true, false, false, false});
  const auto ci = bootstrap_ci(recs, 200, 1);
  CHECK(ci.point == 1.0);
  CHECK(ci.lo == 1.0);
  CHECK(ci.hi == 1.0);
}

TEST_CASE("bootstrap CI covers the analytic AUROC of two normals") {
  // Errors ~ N(1, 1), correct ~ N(0, 1): AUROC = Phi(1 / sqrt 2).
  const double analytic = 0.5 * std::erfc(-(1.0 / std::sqrt(2.0)) / std::sqrt(2.0));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> scores;
  std::vector<bool> errors;
  for (int i = 0; i < 400; ++i) {
    errors.push_back(i % 2 == 0);
    scores.push_back(noise(rng) + (errors.back() ? 1.0 : 0.0));
  }
  const auto ci = bootstrap_ci(records_of(scores, errors), 1000, 7);
  CHECK(ci.lo <= analytic);
  CHECK(analytic <= ci.hi);
}

TEST_CASE("ablation grids must be positive and increasing") {
  CHECK_NOTHROW((AblationGrid{{5, 10, 20}, {1, 2, 3, 4, 5}}.validate()));
  CHECK_THROWS_AS((AblationGrid{{5, 5}, {}}.validate()), Error);
  CHECK_THROWS_AS((AblationGrid{{}, {0, 1}}.validate()), Error);
}

TEST_CASE("m ablation emits one row per grid point and estimator") {
  MockBackend mock;
  std::vector<QaItem> data;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "q" + std::to_string(i);
    data.push_back({{id, "Is there an effusion?", std::nullopt, {}}, "yes"});
    if (i % 2 == 0) {
      mock.add(id, {make_sample("yes", {-0.1})});
    } else {
      mock.add(id, {make_sample("no", {-0.1}), make_sample("yes", {-0.3}), make_sample("no", {-0.2})});
    }
  }
  const std::vector<int> grid = {5, 10};
  const std::vector<EstimatorKind> est = {EstimatorKind::kDiscrete, EstimatorKind::kCombined};
  AblationOptions opts;
  opts.n_boot = 200;
  const auto rows = run_m_ablation(data, grid, est, BinaryRuleJudge{}, mock, opts);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].knob == "m");
  CHECK(rows[0].value == 5);
  CHECK(rows[3].value == 10);
  CHECK(rows[3].estimator == EstimatorKind::kCombined);
  for (const auto& r : rows) {
    REQUIRE(r.auroc.has_value());
    CHECK(r.auroc->point == 1.0);
  }
}

TEST_CASE("probes ablation shape and failure markers") {
  MockBackend mock;
  std::vector<ReportItem> data;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "rep" + std::to_string(i);
    const std::string report = "Lungs are clear. Heart is enlarged.";
    data.push_back({{id, "Describe.", std::nullopt, {}}, report, {true, i % 2 == 0}});
    mock.add(id + "|" + template_probe("Lungs are clear.").question, {make_sample("yes", {-0.1})});
    mock.add(id + "|" + template_probe("Heart is enlarged.").question,
             i % 2 == 0 ? std::vector<GenerationSample>{make_sample("yes", {-0.1})}
                        : std::vector<GenerationSample>{make_sample("yes", {-0.1}), make_sample("no", {-0.4})});
  }
  const std::vector<int> grid = {1, 2, 3, 4, 5};
  const std::vector<EstimatorKind> est = {EstimatorKind::kCombined, EstimatorKind::kDiscrete};
  AblationOptions opts;
  opts.n_boot = 200;
  const auto rows = run_probes_ablation(data, grid, est, mock, opts);
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    if (r.estimator == EstimatorKind::kCombined) {
      REQUIRE(r.auroc.has_value());
      CHECK(r.auroc->point == 1.0);
    } else {
      CHECK_FALSE(r.auroc.has_value());
      CHECK_FALSE(r.failure.empty());
    }
  }

  data[0].sentence_correct.pop_back();
  CHECK_THROWS_AS(run_probes_ablation(data, grid, est, mock, opts), Error);
}
