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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semuq/backend.hpp"

namespace semuq {

struct ScoredGeneration {
  std::string text;
  double policy_logprob = 0.0;     // log pi_theta(s | x)
  double reference_logprob = 0.0;  // log pi_ref(s | x)
  double score = 0.0;              // report quality in [0, 1]

  double log_ratio() const { return policy_logprob - reference_logprob; }
};

struct PreferencePair {
  std::string prompt_id;
  ScoredGeneration winner;
  ScoredGeneration loser;
  double score_gap = 0.0;

  void validate() const;
};

struct DpoConfig {
  double beta = 0.1;
};

enum class ScorerKind { kTokenF1Reference, kExternalLabeler };

class ReportScorer {
 public:
  virtual ~ReportScorer() = default;
  virtual double score(std::string_view candidate, std::string_view reference) const = 0;
  virtual ScorerKind kind() const = 0;
};

// Bag-of-tokens F1 after lowercasing and stripping punctuation.
class TokenF1Scorer : public ReportScorer {
 public:
  double score(std::string_view candidate, std::string_view reference) const override;
  ScorerKind kind() const override { return ScorerKind::kTokenF1Reference; }
};

/// Label-set F1 from an external labeler. POSTs {"candidate", "reference"}
/// and expects {"candidate_labels": [...], "reference_labels": [...]}.
class ExternalLabelerScorer : public ReportScorer {
 public:
  explicit ExternalLabelerScorer(HttpEndpoint endpoint, RetryPolicy retry = {})
      : endpoint_(std::move(endpoint)), retry_(retry) {}
  double score(std::string_view candidate, std::string_view reference) const override;
  ScorerKind kind() const override { return ScorerKind::kExternalLabeler; }

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
};

// F1 between two label sets; two empty sets agree perfectly.
double label_set_f1(std::span<const std::string> predicted, std::span<const std::string> reference);

double score_generation(std::string_view candidate, std::string_view reference,
                        const ReportScorer& scorer);

/// Winner is the first candidate with the maximum score, loser the first
/// with the minimum. Returns nothing unless the gap exceeds min_gap.
std::optional<PreferencePair> build_pairs(const std::string& prompt_id,
                                          std::span<const ScoredGeneration> candidates,
                                          double min_gap = 0.0);

// beta * (winner log-ratio - loser log-ratio)
double dpo_margin(const PreferencePair& pair, const DpoConfig& config);

// -log sigmoid(margin), evaluated as softplus(-margin).
double dpo_loss(const PreferencePair& pair, const DpoConfig& config);

struct DpoBatchResult {
  double mean_loss = 0.0;
  std::vector<double> losses;
  // d(mean_loss) / d(policy_logprob) for each pair's winner and loser.
  std::vector<double> grad_winner;
  std::vector<double> grad_loser;
};

DpoBatchResult dpo_batch_loss(std::span<const PreferencePair> pairs, const DpoConfig& config);

}  // namespace semuq
