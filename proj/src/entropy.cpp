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

#include "semuq/entropy.hpp"

#include <cmath>

#include "semuq/error.hpp"
#include "semuq/log_math.hpp"

namespace semuq {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kDiscrete: return "discrete";
    case EstimatorKind::kRaoBlackwell: return "rao_blackwell";
    case EstimatorKind::kWithinOnly: return "within_only";
    case EstimatorKind::kCombined: return "combined";
  }
  return "combined";
}

bool needs_likelihoods(EstimatorKind kind) { return kind != EstimatorKind::kDiscrete; }

namespace {

void require_clusters(const Clustering& clustering) {
  if (clustering.clusters.empty() || clustering.sample_count == 0) {
    throw Error(ErrorKind::kInvalidInput, "clustering is empty");
  }
}

}  // namespace

double discrete_entropy(const Clustering& clustering) {
  require_clusters(clustering);
  std::vector<double> probs;
  probs.reserve(clustering.clusters.size());
  const double m = static_cast<double>(clustering.sample_count);
  for (const auto& c : clustering.clusters) {
    probs.push_back(static_cast<double>(c.member_indices.size()) / m);
  }
  return entropy_from_probs<double>(probs);
}

std::vector<double> cluster_log_masses(const Clustering& clustering) {
  require_clusters(clustering);
  std::vector<double> out;
  out.reserve(clustering.clusters.size());
  for (const auto& c : clustering.clusters) {
    if (!c.log_mass) {
      throw Error(ErrorKind::kMissingLikelihoods, "a sample has no token log-probabilities");
    }
    out.push_back(*c.log_mass);
  }
  return out;
}

double rao_blackwell_entropy(const Clustering& clustering) {
  return entropy_from_log_weights<double>(cluster_log_masses(clustering));
}

double within_cluster_entropy(const SemanticCluster& cluster) {
  if (cluster.dedup_members.empty()) {
    throw Error(ErrorKind::kInvalidInput, "cluster has no members");
  }
  std::vector<double> lps;
  lps.reserve(cluster.dedup_members.size());
  for (const auto& d : cluster.dedup_members) {
    if (!d.log_prob) {
      throw Error(ErrorKind::kMissingLikelihoods, "a sample has no token log-probabilities");
    }
    lps.push_back(*d.log_prob);
  }
  return entropy_from_log_weights<double>(lps);
}

double corrected_entropy(const Clustering& clustering, EstimatorKind kind) {
  if (kind != EstimatorKind::kWithinOnly && kind != EstimatorKind::kCombined) {
    throw Error(ErrorKind::kInvalidInput, "corrected entropy needs within_only or combined");
  }
  const std::vector<double> masses = cluster_log_masses(clustering);
  const double total = log_sum_exp<double>(masses);
  double within = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double weight = std::exp(masses[i] - total);
    if (weight > 0.0) within += weight * within_cluster_entropy(clustering.clusters[i]);
  }
  if (kind == EstimatorKind::kWithinOnly) return within;
  return entropy_from_log_weights<double>(masses) + within;
}

double estimate_entropy(const Clustering& clustering, EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kDiscrete: return discrete_entropy(clustering);
    case EstimatorKind::kRaoBlackwell: return rao_blackwell_entropy(clustering);
    case EstimatorKind::kWithinOnly:
    case EstimatorKind::kCombined: return corrected_entropy(clustering, kind);
  }
  return 0.0;
}

EntropyReport entropy_report(const Clustering& clustering, std::string context_id) {
  require_clusters(clustering);
  EntropyReport report;
  report.context_id = std::move(context_id);
  report.m = clustering.sample_count;
  report.cluster_count = clustering.clusters.size();
  report.values[static_cast<std::size_t>(EstimatorKind::kDiscrete)] = discrete_entropy(clustering);
  if (!clustering.has_likelihoods()) return report;

  for (auto kind : {EstimatorKind::kRaoBlackwell, EstimatorKind::kWithinOnly, EstimatorKind::kCombined}) {
    report.values[static_cast<std::size_t>(kind)] = estimate_entropy(clustering, kind);
  }
  for (std::size_t i = 0; i < clustering.clusters.size(); ++i) {
    report.per_cluster_within.emplace_back(i, within_cluster_entropy(clustering.clusters[i]));
  }
  return report;
}

}  // namespace semuq
