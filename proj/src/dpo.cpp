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

#include "semuq/dpo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "http_util.hpp"
#include "semuq/error.hpp"
#include "semuq/log_math.hpp"
#include "semuq/text.hpp"

namespace semuq {

void PreferencePair::validate() const {
  if (!std::isfinite(winner.policy_logprob) || !std::isfinite(winner.reference_logprob) ||
      !std::isfinite(loser.policy_logprob) || !std::isfinite(loser.reference_logprob)) {
    throw Error(ErrorKind::kInvalidInput, "pair '" + prompt_id + "' has non-finite log-probabilities");
  }
  if (!(winner.score > loser.score)) {
    throw Error(ErrorKind::kInvalidInput, "pair '" + prompt_id + "': winner must outscore loser");
  }
}

double TokenF1Scorer::score(std::string_view candidate, std::string_view reference) const {
  std::map<std::string, int> ref_counts;
  for (auto& t : normalized_tokens(reference)) ++ref_counts[t];
  const auto cand = normalized_tokens(candidate);
  if (cand.empty() || ref_counts.empty()) return 0.0;

  int ref_total = 0;
  for (const auto& [_, n] : ref_counts) ref_total += n;
  int overlap = 0;
  for (const auto& t : cand) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(cand.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  return 2.0 * precision * recall / (precision + recall);
}

double label_set_f1(std::span<const std::string> predicted, std::span<const std::string> reference) {
  const std::set<std::string> p(predicted.begin(), predicted.end());
  const std::set<std::string> r(reference.begin(), reference.end());
  if (p.empty() && r.empty()) return 1.0;
  if (p.empty() || r.empty()) return 0.0;
  std::size_t tp = 0;
  for (const auto& label : p) tp += r.count(label);
  return 2.0 * static_cast<double>(tp) / static_cast<double>(p.size() + r.size());
}

double ExternalLabelerScorer::score(std::string_view candidate, std::string_view reference) const {
  const nlohmann::json body = {{"candidate", candidate}, {"reference", reference}};
  const int attempts = std::max(retry_.attempts, 1);
  auto backoff = retry_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    try {
      const auto res = detail::post_json(endpoint_.base_url, "", body, endpoint_.api_key,
                                         endpoint_.timeout, ErrorKind::kScorerUnavailable);
      const auto cand = res.at("candidate_labels").get<std::vector<std::string>>();
      const auto ref = res.at("reference_labels").get<std::vector<std::string>>();
      return label_set_f1(cand, ref);
    } catch (const TransientError& e) {
      last_error = e.what();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kScorerUnavailable, std::string("malformed labeler reply: ") + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kScorerUnavailable) throw;
      throw Error(ErrorKind::kScorerUnavailable, e.what());
    }
  }
  throw Error(ErrorKind::kScorerUnavailable, last_error);
}

double score_generation(std::string_view candidate, std::string_view reference,
                        const ReportScorer& scorer) {
  if (reference.empty()) throw Error(ErrorKind::kInvalidInput, "reference report is empty");
  return std::clamp(scorer.score(candidate, reference), 0.0, 1.0);
}

std::optional<PreferencePair> build_pairs(const std::string& prompt_id,
                                          std::span<const ScoredGeneration> candidates,
                                          double min_gap) {
  if (candidates.size() < 2) {
    throw Error(ErrorKind::kTooFewCandidates, "need at least two candidates for '" + prompt_id + "'");
  }
  std::size_t best = 0;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[best].score) best = i;
    if (candidates[i].score < candidates[worst].score) worst = i;
  }
  const double gap = candidates[best].score - candidates[worst].score;
  if (!(gap > min_gap) || best == worst) return std::nullopt;
  return PreferencePair{prompt_id, candidates[best], candidates[worst], gap};
}

double dpo_margin(const PreferencePair& pair, const DpoConfig& config) {
  return config.beta * (pair.winner.log_ratio() - pair.loser.log_ratio());
}

double dpo_loss(const PreferencePair& pair, const DpoConfig& config) {
  return softplus(-dpo_margin(pair, config));
}

DpoBatchResult dpo_batch_loss(std::span<const PreferencePair> pairs, const DpoConfig& config) {
  if (pairs.empty()) throw Error(ErrorKind::kEmptyBatch, "no preference pairs");
  if (!(config.beta > 0.0)) throw Error(ErrorKind::kInvalidConfig, "beta must be > 0");

  const double n = static_cast<double>(pairs.size());
  DpoBatchResult out;
  out.losses.reserve(pairs.size());
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const double margin = dpo_margin(pair, config);
    const double loss = softplus(-margin);
    out.losses.push_back(loss);
    sum += loss;
    // d softplus(-x)/dx = -sigmoid(-x)
    const double g = config.beta * sigmoid(-margin) / n;
    out.grad_winner.push_back(-g);
    out.grad_loser.push_back(g);
  }
  out.mean_loss = sum / n;
  return out;
}

}  // namespace semuq
