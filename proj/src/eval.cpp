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

#include "semuq/eval.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>

#include "semuq/error.hpp"

namespace semuq {

bool judge_correct(std::string_view generated, std::string_view reference,
                   const EquivalenceJudge& judge) {
  if (reference.empty()) throw Error(ErrorKind::kInvalidInput, "reference answer is empty");
  if (generated.empty()) return false;
  return judge_equivalent(generated, reference, judge);
}

double auroc(std::span<const double> scores, std::span<const bool> is_error) {
  if (scores.size() != is_error.size()) {
    throw Error(ErrorKind::kInvalidInput, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Walk tie groups in increasing score; an error beats every correct
  // record in lower groups and half of those in its own group.
  double wins = 0.0;
  double correct_below = 0.0;
  double n_err = 0.0;
  double n_ok = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double err = 0.0;
    double ok = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (is_error[order[j]] ? err : ok) += 1.0;
      ++j;
    }
    wins += err * correct_below + 0.5 * err * ok;
    correct_below += ok;
    n_err += err;
    n_ok += ok;
    i = j;
  }
  if (n_err == 0.0 || n_ok == 0.0) {
    throw Error(ErrorKind::kDegenerateLabels, "AUROC needs both erroneous and correct records");
  }
  return wins / (n_err * n_ok);
}

double auroc(std::span<const EvalRecord> records) {
  std::vector<double> scores;
  std::vector<char> errors;
  scores.reserve(records.size());
  for (const auto& r : records) {
    scores.push_back(r.uncertainty);
    errors.push_back(!r.correct);
  }
  // std::vector<bool> has no contiguous storage for a span.
  const std::unique_ptr<bool[]> flags(new bool[errors.size()]);
  std::copy(errors.begin(), errors.end(), flags.get());
  return auroc(scores, std::span<const bool>(flags.get(), errors.size()));
}

ConfidenceInterval bootstrap_ci(std::span<const EvalRecord> records, std::size_t n_boot,
                                std::uint64_t seed) {
  if (n_boot < 100) throw Error(ErrorKind::kInvalidConfig, "n_boot must be >= 100");
  ConfidenceInterval ci;
  ci.point = auroc(records);

  const std::size_t n = records.size();
  std::mt19937_64 rng(seed);
  std::vector<EvalRecord> resample(n);
  std::vector<double> stats;
  stats.reserve(n_boot);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 100 * n_boot;
  while (stats.size() < n_boot) {
    if (++attempts > max_attempts) {
      throw Error(ErrorKind::kDegenerateLabels, "bootstrap kept drawing single-class resamples");
    }
    std::size_t errors = 0;
    for (auto& r : resample) {
      r = records[static_cast<std::size_t>(rng() % n)];
      errors += r.correct ? 0 : 1;
    }
    if (errors == 0 || errors == n) continue;
    stats.push_back(auroc(resample));
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(stats.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, stats.size() - 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  ci.lo = quantile(0.025);
  ci.hi = quantile(0.975);
  return ci;
}

void AblationGrid::validate() const {
  auto check = [](const std::vector<int>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 1 || (i > 0 && v[i] <= v[i - 1])) {
        throw Error(ErrorKind::kInvalidConfig,
                    std::string(name) + " must be positive and strictly increasing");
      }
    }
  };
  check(m_values, "m grid");
  check(probes_values, "probes grid");
}

const GenerationSample& committed_answer(const SampleSet& samples) {
  if (samples.samples.empty()) throw Error(ErrorKind::kEmptySampleSet, "no samples");
  std::size_t best = 0;
  std::optional<double> best_lp = sequence_log_prob(samples.samples[0]);
  for (std::size_t i = 1; i < samples.samples.size(); ++i) {
    const auto lp = sequence_log_prob(samples.samples[i]);
    if (lp && (!best_lp || *lp > *best_lp)) {
      best = i;
      best_lp = lp;
    }
  }
  return samples.samples[best];
}

namespace {

std::vector<AblationRow> rows_for(const std::string& knob, int value,
                                  std::span<const EstimatorKind> estimators,
                                  std::span<const EvalRecord> records, const AblationOptions& options) {
  std::vector<AblationRow> rows;
  for (auto kind : estimators) {
    AblationRow row{knob, value, kind, 0, std::nullopt, {}};
    std::vector<EvalRecord> subset;
    std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                 [&](const EvalRecord& r) { return r.estimator == kind; });
    row.n_records = subset.size();
    if (subset.empty()) {
      row.failure = "no records (estimator unavailable for this data)";
    } else {
      try {
        row.auroc = bootstrap_ci(subset, options.n_boot, options.seed);
      } catch (const Error& e) {
        row.failure = e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<EvalRecord> evaluate_qa(std::span<const QaItem> dataset, int m,
                                    std::span<const EstimatorKind> estimators,
                                    const EquivalenceJudge& judge, const Backend& backend,
                                    const AblationOptions& options) {
  SamplingConfig config = options.sampling;
  config.m = m;
  std::vector<EvalRecord> records;
  for (const auto& item : dataset) {
    const SampleSet samples = sample_generations(item.context, config, backend, options.gateway);
    const Clustering clusters = cluster(samples, judge, options.clustering);
    const EntropyReport report = entropy_report(clusters, item.context.id);
    const bool correct = judge_correct(committed_answer(samples).text, item.reference, judge);
    for (auto kind : estimators) {
      if (const auto& v = report.value(kind)) {
        records.push_back({item.context.id, *v, correct, kind});
      }
    }
  }
  return records;
}

std::vector<AblationRow> run_m_ablation(std::span<const QaItem> dataset, std::span<const int> m_values,
                                        std::span<const EstimatorKind> estimators,
                                        const EquivalenceJudge& judge, const Backend& backend,
                                        const AblationOptions& options) {
  if (dataset.empty()) throw Error(ErrorKind::kInvalidInput, "empty dataset");
  AblationGrid{std::vector<int>(m_values.begin(), m_values.end()), {}}.validate();
  std::vector<AblationRow> rows;
  for (int m : m_values) {
    const auto records = evaluate_qa(dataset, m, estimators, judge, backend, options);
    auto part = rows_for("m", m, estimators, records, options);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<EvalRecord> evaluate_reports(std::span<const ReportItem> dataset, int probes,
                                         std::span<const EstimatorKind> estimators,
                                         const Backend& backend, const AblationOptions& options) {
  AssessOptions assess = options.assess;
  assess.probes_per_sentence = probes;
  assess.gateway = options.gateway;
  std::vector<EvalRecord> records;
  for (const auto& item : dataset) {
    const auto doc = segment_report(item.report, item.context.id);
    if (doc.sentences.size() != item.sentence_correct.size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "report '" + item.context.id + "' has " + std::to_string(doc.sentences.size()) +
                      " sentences but " + std::to_string(item.sentence_correct.size()) + " labels");
    }
    const auto assessments = assess_report(doc, item.context, backend, assess);
    for (const auto& a : assessments) {
      if (!a.entropy) continue;
      const std::string id = item.context.id + "#" + std::to_string(a.sentence_index);
      for (auto kind : estimators) {
        if (kind != EstimatorKind::kWithinOnly && kind != EstimatorKind::kCombined) continue;
        records.push_back({id, sentence_entropy(a.clusters, kind),
                           item.sentence_correct[a.sentence_index], kind});
      }
    }
  }
  return records;
}

std::vector<AblationRow> run_probes_ablation(std::span<const ReportItem> dataset,
                                             std::span<const int> probes_values,
                                             std::span<const EstimatorKind> estimators,
                                             const Backend& backend, const AblationOptions& options) {
  if (dataset.empty()) throw Error(ErrorKind::kInvalidInput, "empty dataset");
  AblationGrid{{}, std::vector<int>(probes_values.begin(), probes_values.end())}.validate();
  std::vector<AblationRow> rows;
  for (int k : probes_values) {
    const auto records = evaluate_reports(dataset, k, estimators, backend, options);
    auto part = rows_for("probes", k, estimators, records, options);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

}  // namespace semuq
