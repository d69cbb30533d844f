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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semuq/clustering.hpp"

namespace semuq {

enum class EstimatorKind {
  kDiscrete,      // cluster frequencies
  kRaoBlackwell,  // normalized cluster likelihood masses
  kWithinOnly,    // mass-weighted within-cluster entropy
  kCombined,      // kRaoBlackwell + kWithinOnly
};

inline constexpr std::array<EstimatorKind, 4> kAllEstimators = {
    EstimatorKind::kDiscrete, EstimatorKind::kRaoBlackwell, EstimatorKind::kWithinOnly,
    EstimatorKind::kCombined};

const char* to_string(EstimatorKind kind);
bool needs_likelihoods(EstimatorKind kind);

// All entropies are in nats.

double discrete_entropy(const Clustering& clustering);

// Per-cluster log P(c). Throws kInvalidInput for an empty clustering and
// kMissingLikelihoods when any sample lacks log-probabilities.
std::vector<double> cluster_log_masses(const Clustering& clustering);

double rao_blackwell_entropy(const Clustering& clustering);

// Entropy of the normalized dedup-member distribution inside one cluster.
double within_cluster_entropy(const SemanticCluster& cluster);

// kWithinOnly: sum_i pbar_i H_{C_i}. kCombined: rao_blackwell + kWithinOnly.
double corrected_entropy(const Clustering& clustering, EstimatorKind kind);

double estimate_entropy(const Clustering& clustering, EstimatorKind kind);

struct EntropyReport {
  std::string context_id;
  std::size_t m = 0;
  std::size_t cluster_count = 0;
  // Indexed by EstimatorKind; empty when the estimator could not run.
  std::array<std::optional<double>, 4> values{};
  std::vector<std::pair<std::size_t, double>> per_cluster_within;

  const std::optional<double>& value(EstimatorKind kind) const {
    return values[static_cast<std::size_t>(kind)];
  }
};

/// Every estimator for one clustering. Likelihood-based values are left
/// empty, not thrown, when log-probabilities are missing.
EntropyReport entropy_report(const Clustering& clustering, std::string context_id = {});

}  // namespace semuq
