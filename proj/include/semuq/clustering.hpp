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
#include "semuq/sample.hpp"

namespace semuq {

enum class JudgeKind { kBinaryRule, kNormalizedExact, kRemoteNli };

/// Semantic equivalence E(a, b). Implementations are deterministic for fixed
/// inputs and reflexive on non-empty text.
class EquivalenceJudge {
 public:
  virtual ~EquivalenceJudge() = default;
  virtual bool equivalent(std::string_view a, std::string_view b) const = 0;
  virtual JudgeKind kind() const = 0;
  // True when the relation is guaranteed to be an equivalence relation.
  virtual bool transitive() const { return false; }
};

/// Yes/no answers: equivalent when both normalize to the same known label,
/// or when their normalized texts are identical.
class BinaryRuleJudge : public EquivalenceJudge {
 public:
  bool equivalent(std::string_view a, std::string_view b) const override;
  JudgeKind kind() const override { return JudgeKind::kBinaryRule; }
  bool transitive() const override { return true; }
};

class NormalizedExactJudge : public EquivalenceJudge {
 public:
  bool equivalent(std::string_view a, std::string_view b) const override;
  JudgeKind kind() const override { return JudgeKind::kNormalizedExact; }
  bool transitive() const override { return true; }
};

/// Bidirectional entailment through a remote NLI service. The service takes
/// {"premise", "hypothesis"} and returns one score per NLI label; a entails
/// b iff "entailment" has the top score.
class RemoteNliJudge : public EquivalenceJudge {
 public:
  explicit RemoteNliJudge(HttpEndpoint endpoint, RetryPolicy retry = {})
      : endpoint_(std::move(endpoint)), retry_(retry) {}

  bool equivalent(std::string_view a, std::string_view b) const override;
  JudgeKind kind() const override { return JudgeKind::kRemoteNli; }

  bool entails(std::string_view premise, std::string_view hypothesis) const;

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
};

std::unique_ptr<EquivalenceJudge> make_judge(JudgeKind kind, const HttpEndpoint& nli_endpoint = {});
JudgeKind parse_judge_kind(const std::string& name);
const char* to_string(JudgeKind kind);

/// Checks preconditions (non-empty texts) and asks the judge.
bool judge_equivalent(std::string_view a, std::string_view b, const EquivalenceJudge& judge);

/// A distinct normalized text inside a cluster; duplicates are merged and
/// their probabilities summed in log space.
struct DedupMember {
  std::string text;  // normalized
  std::optional<double> log_prob;
  std::size_t count = 0;
};

struct SemanticCluster {
  std::vector<std::size_t> member_indices;
  std::size_t representative_index = 0;
  std::optional<double> log_mass;  // empty when likelihoods are missing
  std::vector<DedupMember> dedup_members;
};

struct Clustering {
  std::vector<SemanticCluster> clusters;
  std::size_t sample_count = 0;

  bool has_likelihoods() const;
};

struct ClusterOptions {
  bool length_normalized = false;
  bool merge_duplicates = true;
};

/// Greedy first-match clustering: each sample joins the first existing
/// cluster whose representative (first member) it is equivalent to, in
/// creation order, otherwise it founds a new cluster.
Clustering cluster(std::span<const GenerationSample> samples, const EquivalenceJudge& judge,
                   const ClusterOptions& options = {});
Clustering cluster(const SampleSet& samples, const EquivalenceJudge& judge,
                   const ClusterOptions& options = {});

// Groups texts by normalize_text, merging log-probabilities. Shared by the
// semantic clustering and the binary yes/no clustering.
std::vector<DedupMember> dedup_members(std::span<const std::string> texts,
                                       std::span<const std::optional<double>> log_probs,
                                       bool merge_duplicates);

}  // namespace semuq
