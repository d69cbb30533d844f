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

#include "semuq/clustering.hpp"

#include <algorithm>
#include <thread>

#include "http_util.hpp"
#include "semuq/error.hpp"
#include "semuq/gateway.hpp"
#include "semuq/log_math.hpp"
#include "semuq/text.hpp"

namespace semuq {

bool BinaryRuleJudge::equivalent(std::string_view a, std::string_view b) const {
  const std::string na = normalize_text(a);
  const std::string nb = normalize_text(b);
  if (na == nb) return true;
  const AnswerLabel la = normalize_answer(na);
  return la != AnswerLabel::kUnknown && la == normalize_answer(nb);
}

bool NormalizedExactJudge::equivalent(std::string_view a, std::string_view b) const {
  return normalize_text(a) == normalize_text(b);
}

bool RemoteNliJudge::entails(std::string_view premise, std::string_view hypothesis) const {
  const nlohmann::json body = {{"premise", premise}, {"hypothesis", hypothesis}};
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
                                         endpoint_.timeout, ErrorKind::kRemoteJudgeUnavailable);
      const double ent = res.at("entailment").get<double>();
      const double neu = res.at("neutral").get<double>();
      const double con = res.at("contradiction").get<double>();
      return ent > neu && ent > con;
    } catch (const TransientError& e) {
      last_error = e.what();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kRemoteJudgeUnavailable, std::string("malformed NLI reply: ") + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kRemoteJudgeUnavailable) throw;
      throw Error(ErrorKind::kRemoteJudgeUnavailable, e.what());
    }
  }
  throw Error(ErrorKind::kRemoteJudgeUnavailable, last_error);
}

bool RemoteNliJudge::equivalent(std::string_view a, std::string_view b) const {
  if (a == b) return true;
  return entails(a, b) && entails(b, a);
}

std::unique_ptr<EquivalenceJudge> make_judge(JudgeKind kind, const HttpEndpoint& nli_endpoint) {
  switch (kind) {
    case JudgeKind::kBinaryRule: return std::make_unique<BinaryRuleJudge>();
    case JudgeKind::kNormalizedExact: return std::make_unique<NormalizedExactJudge>();
    case JudgeKind::kRemoteNli: return std::make_unique<RemoteNliJudge>(nli_endpoint);
  }
  return std::make_unique<NormalizedExactJudge>();
}

JudgeKind parse_judge_kind(const std::string& name) {
  if (name == "binary_rule") return JudgeKind::kBinaryRule;
  if (name == "normalized_exact") return JudgeKind::kNormalizedExact;
  if (name == "remote_nli") return JudgeKind::kRemoteNli;
  throw Error(ErrorKind::kInvalidConfig, "unknown judge '" + name + "'");
}

const char* to_string(JudgeKind kind) {
  switch (kind) {
    case JudgeKind::kBinaryRule: return "binary_rule";
    case JudgeKind::kNormalizedExact: return "normalized_exact";
    case JudgeKind::kRemoteNli: return "remote_nli";
  }
  return "normalized_exact";
}

bool judge_equivalent(std::string_view a, std::string_view b, const EquivalenceJudge& judge) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kInvalidInput, "equivalence is only defined for non-empty text");
  }
  return judge.equivalent(a, b);
}

bool Clustering::has_likelihoods() const {
  return !clusters.empty() &&
         std::all_of(clusters.begin(), clusters.end(), [](const auto& c) { return c.log_mass.has_value(); });
}

std::vector<DedupMember> dedup_members(std::span<const std::string> texts,
                                       std::span<const std::optional<double>> log_probs,
                                       bool merge_duplicates) {
  std::vector<DedupMember> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string norm = normalize_text(texts[i]);
    auto it = merge_duplicates
                  ? std::find_if(out.begin(), out.end(), [&](const auto& d) { return d.text == norm; })
                  : out.end();
    if (it == out.end()) {
      out.push_back({std::move(norm), log_probs[i], 1});
      continue;
    }
    ++it->count;
    if (it->log_prob && log_probs[i]) {
      it->log_prob = log_add(*it->log_prob, *log_probs[i]);
    } else {
      it->log_prob.reset();
    }
  }
  return out;
}

Clustering cluster(std::span<const GenerationSample> samples, const EquivalenceJudge& judge,
                   const ClusterOptions& options) {
  if (samples.empty()) throw Error(ErrorKind::kEmptySampleSet, "cannot cluster zero samples");

  // Empty texts (failed generations) only match each other.
  auto same = [&](const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    return judge.equivalent(a, b);
  };

  Clustering out;
  out.sample_count = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto home = std::find_if(out.clusters.begin(), out.clusters.end(), [&](const SemanticCluster& c) {
      return same(samples[c.representative_index].text, samples[i].text);
    });
    if (home == out.clusters.end()) {
      out.clusters.push_back({{i}, i, std::nullopt, {}});
    } else {
      home->member_indices.push_back(i);
    }
  }

  for (auto& c : out.clusters) {
    std::vector<std::string> texts;
    std::vector<std::optional<double>> lps;
    std::vector<double> finite_lps;
    for (std::size_t idx : c.member_indices) {
      texts.push_back(samples[idx].text);
      lps.push_back(sequence_log_prob(samples[idx], options.length_normalized));
      if (lps.back()) finite_lps.push_back(*lps.back());
    }
    if (finite_lps.size() == lps.size()) c.log_mass = log_sum_exp<double>(finite_lps);
    c.dedup_members = dedup_members(texts, lps, options.merge_duplicates);
  }
  return out;
}

Clustering cluster(const SampleSet& samples, const EquivalenceJudge& judge,
                   const ClusterOptions& options) {
  return cluster(std::span<const GenerationSample>(samples.samples), judge, options);
}

}  // namespace semuq
