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

#include "semuq/report.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "semuq/error.hpp"
#include "semuq/log_math.hpp"

namespace semuq {

namespace {

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "dr", "mr", "mrs", "ms", "prof", "st", "vs", "e.g", "i.e", "approx", "fig", "cf", "al", "resp"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// The word ending just before position `dot`, lowercased, without leading
// brackets or quotes.
std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  while (begin < dot && (text[begin] == '(' || text[begin] == '"' || text[begin] == '[')) ++begin;
  std::string word(text.substr(begin, dot - begin));
  for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return word;
}

bool period_ends_sentence(std::string_view text, std::size_t i) {
  const std::size_t n = text.size();
  if (i + 1 < n && !is_space(text[i + 1]) && !is_closer(text[i + 1])) return false;
  if (i > 0 && is_digit(text[i - 1]) && i + 1 < n && is_digit(text[i + 1])) return false;

  const std::string word = word_before(text, i);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end()) {
    return false;
  }
  if (word == "no") {
    std::size_t j = i + 1;
    while (j < n && is_space(text[j])) ++j;
    if (j < n && is_digit(text[j])) return false;
  }
  return true;
}

bool blank_line_at(std::string_view text, std::size_t i) {
  if (text[i] != '\n') return false;
  for (std::size_t j = i + 1; j < text.size() && is_space(text[j]); ++j) {
    if (text[j] == '\n') return true;
  }
  return false;
}

}  // namespace

ReportDecomposition segment_report(std::string_view report, std::string report_id) {
  ReportDecomposition doc{std::move(report_id), {}};

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(report[begin])) ++begin;
    while (end > begin && is_space(report[end - 1])) --end;
    const auto span = report.substr(begin, end - begin);
    const bool has_content =
        std::any_of(span.begin(), span.end(), [](unsigned char ch) { return std::isalnum(ch) != 0; });
    if (has_content) doc.sentences.push_back({std::string(report.substr(begin, end - begin)), begin, end});
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < report.size(); ++i) {
    const char c = report[i];
    bool boundary = false;
    std::size_t end = i + 1;
    if (c == ';') {
      boundary = true;
    } else if (c == '.' || c == '?' || c == '!') {
      boundary = c == '.' ? period_ends_sentence(report, i)
                          : (i + 1 == report.size() || is_space(report[i + 1]) || is_closer(report[i + 1]));
      while (boundary && end < report.size() && is_closer(report[end])) ++end;
    } else if (blank_line_at(report, i)) {
      boundary = true;
      end = i;
    }
    if (boundary) {
      emit(start, end);
      start = end;
      i = end == i ? i : end - 1;
    }
  }
  emit(start, report.size());

  if (doc.sentences.empty()) throw Error(ErrorKind::kEmptyReport, "report has no sentences");
  return doc;
}

double BinaryClustering::c0_within() const {
  if (c0_dedup.empty()) return 0.0;
  std::vector<double> lps;
  for (const auto& d : c0_dedup) lps.push_back(d.log_prob.value());
  return entropy_from_log_weights<double>(lps);
}

double BinaryClustering::c1_within() const {
  if (c1_dedup.empty()) return 0.0;
  std::vector<double> lps;
  for (const auto& d : c1_dedup) lps.push_back(d.log_prob.value());
  return entropy_from_log_weights<double>(lps);
}

BinaryClustering binary_cluster(std::span<const ProbeAnswers> probe_answers, bool merge_duplicates) {
  BinaryClustering out;
  std::array<std::vector<std::string>, 2> texts;
  std::array<std::vector<std::optional<double>>, 2> lps;
  std::array<std::vector<double>, 2> finite;

  for (const auto& pa : probe_answers) {
    auto& row = out.assignment.emplace_back();
    for (const auto& sample : pa.answers.samples) {
      const auto lp = sequence_log_prob(sample);
      if (!lp) throw Error(ErrorKind::kMissingLikelihoods, "probe answer has no log-probabilities");
      const int c = normalize_answer(sample.text) == pa.probe.expected_answer ? 1 : 0;
      row.push_back(c);
      texts[c].push_back(sample.text);
      lps[c].push_back(lp);
      finite[c].push_back(*lp);
    }
  }
  if (texts[0].empty() && texts[1].empty()) {
    throw Error(ErrorKind::kNoParseableAnswers, "no answers to cluster");
  }
  if (!texts[0].empty()) {
    out.c0_log_mass = log_sum_exp<double>(finite[0]);
    out.c0_dedup = dedup_members(texts[0], lps[0], merge_duplicates);
  }
  if (!texts[1].empty()) {
    out.c1_log_mass = log_sum_exp<double>(finite[1]);
    out.c1_dedup = dedup_members(texts[1], lps[1], merge_duplicates);
  }
  return out;
}

double sentence_entropy(std::optional<double> c0_log_mass, std::optional<double> c1_log_mass,
                        double c0_within, double c1_within, EstimatorKind kind) {
  if (!c0_log_mass && !c1_log_mass) {
    throw Error(ErrorKind::kInvalidInput, "both answer groups are empty");
  }
  if (kind != EstimatorKind::kWithinOnly && kind != EstimatorKind::kCombined) {
    throw Error(ErrorKind::kInvalidInput, "sentence entropy needs within_only or combined");
  }
  const double l0 = c0_log_mass.value_or(neg_infinity<double>());
  const double l1 = c1_log_mass.value_or(neg_infinity<double>());
  const double total = log_add(l0, l1);
  const double p0 = std::exp(l0 - total);
  const double p1 = std::exp(l1 - total);

  double h = 0.0;
  if (p0 > 0.0) h += p0 * c0_within;
  if (p1 > 0.0) h += p1 * c1_within;
  if (kind == EstimatorKind::kCombined) {
    const std::array<double, 2> weights = {l0, l1};
    h += entropy_from_log_weights<double>(weights);
  }
  return h;
}

double sentence_entropy(const BinaryClustering& clusters, EstimatorKind kind) {
  return sentence_entropy(clusters.c0_log_mass, clusters.c1_log_mass, clusters.c0_within(),
                          clusters.c1_within(), kind);
}

const char* to_string(Reliability level) {
  switch (level) {
    case Reliability::kHigh: return "high";
    case Reliability::kMedium: return "medium";
    case Reliability::kLow: return "low";
  }
  return "low";
}

void ReliabilityThresholds::validate() const {
  if (!(theta_high >= 0.0 && theta_high < theta_low) || !std::isfinite(theta_low)) {
    throw Error(ErrorKind::kInvalidThresholds, "need 0 <= theta_high < theta_low");
  }
}

Reliability reliability_index(double entropy, const ReliabilityThresholds& thresholds) {
  thresholds.validate();
  if (!(entropy >= 0.0)) throw Error(ErrorKind::kInvalidInput, "entropy must be >= 0");
  if (entropy < thresholds.theta_high) return Reliability::kHigh;
  if (entropy < thresholds.theta_low) return Reliability::kMedium;
  return Reliability::kLow;
}

std::vector<SentenceAssessment> assess_report(const ReportDecomposition& doc,
                                              const ProbeContext& context,
                                              const Backend& backend,
                                              const AssessOptions& options) {
  if (options.probes_per_sentence < 1) {
    throw Error(ErrorKind::kInvalidConfig, "probes_per_sentence must be >= 1");
  }
  options.answer_config.validate();
  options.thresholds.validate();
  context.validate();

  std::vector<SentenceAssessment> out;
  std::size_t answered = 0;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& sentence = doc.sentences[i].text;
    SentenceAssessment a;
    a.sentence_index = i;

    std::vector<VQAProbe> probes;
    try {
      probes = generate_probes(sentence, options.probes_per_sentence, backend, i, options.gateway);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBackendUnavailable) throw;
      probes.assign(static_cast<std::size_t>(options.probes_per_sentence), template_probe(sentence, i));
    }

    for (const auto& probe : probes) {
      try {
        a.probes.push_back({probe, answer_probe(probe, context, options.answer_config, backend,
                                                options.gateway)});
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::kBackendUnavailable:
          case ErrorKind::kLogprobsMissing:
          case ErrorKind::kInvalidResponse:
          case ErrorKind::kFixtureMiss: ++a.failed_probes; break;
          default: throw;
        }
      }
    }

    if (!a.probes.empty()) {
      ++answered;
      a.clusters = binary_cluster(a.probes);
      a.entropy = sentence_entropy(a.clusters, options.estimator);
      a.reliability = reliability_index(*a.entropy, options.thresholds);
    }
    out.push_back(std::move(a));
  }
  if (answered == 0) {
    throw Error(ErrorKind::kBackendUnavailable, "no probe could be answered for any sentence");
  }
  return out;
}

std::vector<SentenceAssessment> assess_report(std::string_view report, const ProbeContext& context,
                                              const Backend& backend,
                                              const AssessOptions& options) {
  return assess_report(segment_report(report, context.id), context, backend, options);
}

ThresholdFit calibrate_thresholds(std::span<const LabeledEntropy> labeled) {
  if (labeled.empty()) throw Error(ErrorKind::kInvalidInput, "no labeled entropies");

  std::vector<LabeledEntropy> sorted(labeled.begin(), labeled.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.entropy < b.entropy; });

  // Candidate cuts lie between distinct values, bounded by 0 and max + 1.
  std::vector<double> cuts = {0.0};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].entropy > sorted[i - 1].entropy) {
      cuts.push_back(0.5 * (sorted[i].entropy + sorted[i - 1].entropy));
    }
  }
  cuts.push_back(sorted.back().entropy + 1.0);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // below[k][level] = number of records of that level with entropy < cuts[k].
  std::vector<std::array<std::size_t, 3>> below(cuts.size());
  std::array<std::size_t, 3> totals{};
  for (const auto& r : sorted) ++totals[static_cast<std::size_t>(r.level)];
  {
    std::size_t j = 0;
    std::array<std::size_t, 3> running{};
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      while (j < sorted.size() && sorted[j].entropy < cuts[k]) {
        ++running[static_cast<std::size_t>(sorted[j].level)];
        ++j;
      }
      below[k] = running;
    }
  }

  const std::size_t hi = static_cast<std::size_t>(Reliability::kHigh);
  const std::size_t me = static_cast<std::size_t>(Reliability::kMedium);
  const std::size_t lo = static_cast<std::size_t>(Reliability::kLow);
  ThresholdFit best{{cuts.front(), cuts.size() > 1 ? cuts[1] : cuts.front() + 1.0}, -1.0};
  for (std::size_t a = 0; a < cuts.size(); ++a) {
    for (std::size_t b = a + 1; b < cuts.size(); ++b) {
      std::array<double, 3> correct{};
      correct[hi] = static_cast<double>(below[a][hi]);
      correct[me] = static_cast<double>(below[b][me] - below[a][me]);
      correct[lo] = static_cast<double>(totals[lo] - below[b][lo]);
      double sum = 0.0;
      int present = 0;
      for (std::size_t level = 0; level < 3; ++level) {
        if (totals[level] == 0) continue;
        sum += correct[level] / static_cast<double>(totals[level]);
        ++present;
      }
      const double score = sum / present;
      if (score > best.balanced_accuracy) best = {{cuts[a], cuts[b]}, score};
    }
  }
  return best;
}

}  // namespace semuq
