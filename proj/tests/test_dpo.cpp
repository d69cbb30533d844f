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

#include <random>

#include "doctest.h"
#include "semuq/dpo.hpp"
#include "semuq/error.hpp"
#include "test_support.hpp"

using namespace semuq;
using semuq::testing::LocalServer;

namespace {

PreferencePair pair_with(double w_policy, double w_ref, double l_policy, double l_ref) {
  return {"p", {"w", w_policy, w_ref, 0.9}, {"l", l_policy, l_ref, 0.1}, 0.8};
}

// One pair's loss from the definition, with a long double offset on either policy log-prob.
long double pair_loss_direct(const PreferencePair& p, long double beta, long double dw, long double dl) {
  const long double w = (static_cast<long double>(p.winner.policy_logprob) + dw) - p.winner.reference_logprob;
  const long double l = (static_cast<long double>(p.loser.policy_logprob) + dl) - p.loser.reference_logprob;
  return std::log1p(std::exp(-beta * (w - l)));
}

}  // namespace

TEST_CASE("token F1 scorer") {
  TokenF1Scorer f1;
  CHECK(score_generation("No acute disease.", "no acute disease", f1) == 1.0);
  CHECK(score_generation("cardiomegaly", "no effusion", f1) == 0.0);
  CHECK(score_generation("no acute disease", "no acute cardiopulmonary disease", f1) ==
        doctest::Approx(6.0 / 7.0));
  CHECK_THROWS_AS(score_generation("x", "", f1), Error);
}

TEST_CASE("external labeler scorer computes label-set F1") {
  LocalServer server([](httplib::Server& s) {
    s.Post("/label", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"candidate_labels":["Edema","Cardiomegaly"],"reference_labels":["Edema"]})",
                      "application/json");
    });
  });
  ExternalLabelerScorer scorer({server.base_url() + "/label", "", std::chrono::milliseconds(5000)});
  CHECK(score_generation("a", "b", scorer) == doctest::Approx(2.0 / 3.0));

  ExternalLabelerScorer down({"http://127.0.0.1:1", "", std::chrono::milliseconds(300)},
                             RetryPolicy{1, std::chrono::milliseconds(1)});
  try {
    down.score("a", "b");
    FAIL("expected ScorerUnavailable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kScorerUnavailable);
  }
  const std::vector<std::string> none;
  CHECK(label_set_f1(none, none) == 1.0);
}

TEST_CASE("build_pairs") {
  auto cands = [](std::vector<double> scores) {
    std::vector<ScoredGeneration> out;
    for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({"c" + std::to_string(i), -1.0, -1.0, scores[i]});
    return out;
  };
  const auto two = build_pairs("p", cands({0.8, 0.3}));
  REQUIRE(two);
  CHECK(two->winner.text == "c0");
  CHECK(two->loser.text == "c1");
  CHECK(two->score_gap == doctest::Approx(0.5));

  CHECK_FALSE(build_pairs("p", cands({0.4, 0.4, 0.4})));

  const auto four = build_pairs("p", cands({0.5, 0.9, 0.1, 0.9}));
  REQUIRE(four);
  CHECK(four->winner.text == "c1");
  CHECK(four->loser.text == "c2");
  CHECK(four->score_gap == doctest::Approx(0.8));

  CHECK_FALSE(build_pairs("p", cands({0.5, 0.6}), 0.2));
  CHECK_THROWS_AS(build_pairs("p", cands({0.5})), Error);
}

TEST_CASE("dpo_loss examples") {
  const DpoConfig cfg{0.1};
  CHECK(dpo_loss(pair_with(-3, -3, -7, -7), cfg) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(dpo_loss(pair_with(-2.0, -3.0, -4.0, -3.0), cfg) == doctest::Approx(0.5981388693815918).epsilon(1e-12));
  CHECK(dpo_loss(pair_with(0.0, -1e5, -1e5, 0.0), cfg) < 1e-300);
  CHECK(dpo_loss(pair_with(-1e5, 0.0, 0.0, -1e5), cfg) == doctest::Approx(2e4));
}

TEST_CASE("dpo_loss shape: positive, decreasing, convex, antisymmetric, shift invariant") {
  const DpoConfig cfg{1.0};
  auto loss_at = [&](double delta) { return dpo_loss(pair_with(delta, 0.0, 0.0, 0.0), cfg); };
  double prev = loss_at(-20.0);
  for (double d = -19.5; d <= 20.0; d += 0.5) {
    const double l = loss_at(d);
    CHECK(l > 0.0);
    CHECK(l < prev);
    CHECK(loss_at(d - 0.5) + loss_at(d + 0.5) >= 2 * l - 1e-12);
    prev = l;
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 0.0);
  for (int i = 0; i < 100; ++i) {
    const auto p = pair_with(u(rng), u(rng), u(rng), u(rng));
    PreferencePair swapped{p.prompt_id, p.loser, p.winner, -p.score_gap};
    const double sum = dpo_loss(p, cfg) + dpo_loss(swapped, cfg);
    CHECK(sum >= 2 * std::log(2.0) - 1e-12);

    const double c = u(rng);
    auto shifted = p;
    shifted.winner.policy_logprob += c;
    shifted.winner.reference_logprob += c;
    CHECK(dpo_loss(shifted, cfg) == doctest::Approx(dpo_loss(p, cfg)).epsilon(1e-9));
  }
  const auto even = pair_with(-1, -1, -2, -2);
  PreferencePair even_swapped{"p", even.loser, even.winner, 0};
  CHECK(dpo_loss(even, cfg) + dpo_loss(even_swapped, cfg) == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("dpo_batch_loss") {
  const DpoConfig cfg{0.1};
  const std::vector<PreferencePair> one = {pair_with(-2.0, -3.0, -4.0, -3.0)};
  CHECK(dpo_batch_loss(one, cfg).mean_loss == dpo_loss(one[0], cfg));

  const std::vector<PreferencePair> zeros(4, pair_with(-1, -1, -5, -5));
  const auto r = dpo_batch_loss(zeros, cfg);
  CHECK(r.mean_loss == doctest::Approx(std::log(2.0)));
  for (double g : r.grad_winner) CHECK(g == doctest::Approx(-0.1 / 8));
  for (double g : r.grad_loser) CHECK(g == doctest::Approx(0.1 / 8));

  CHECK_THROWS_AS(dpo_batch_loss(std::vector<PreferencePair>{}, cfg), Error);
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-20.0, 0.0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const double beta = 0.05 + 0.5 * (trial % 5);
    std::vector<PreferencePair> pairs;
    for (int i = size(rng); i > 0; --i) pairs.push_back(pair_with(u(rng), u(rng), u(rng), u(rng)));
    const auto r = dpo_batch_loss(pairs, {beta});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      // Only pair i depends on its own log-probs, so differencing its term alone is exact.
      const long double h = 1e-6L, n = pairs.size(), b = beta;
      const long double fd_w =
          (pair_loss_direct(pairs[i], b, h, 0) - pair_loss_direct(pairs[i], b, -h, 0)) / (2 * h * n);
      const long double fd_l =
          (pair_loss_direct(pairs[i], b, 0, h) - pair_loss_direct(pairs[i], b, 0, -h)) / (2 * h * n);
      CHECK(std::abs(static_cast<double>(fd_w) - r.grad_winner[i]) <= 1e-6 * std::abs(r.grad_winner[i]));
      CHECK(std::abs(static_cast<double>(fd_l) - r.grad_loser[i]) <= 1e-6 * std::abs(r.grad_loser[i]));
    }
  }
}
