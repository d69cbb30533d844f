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

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "semuq/error.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kBackendFailure = 3;
constexpr int kDegenerateData = 4;

int exit_code(semuq::ErrorKind kind) {
  using semuq::ErrorKind;
  switch (kind) {
    case ErrorKind::kBackendUnavailable:
    case ErrorKind::kLogprobsMissing:
    case ErrorKind::kInvalidResponse:
    case ErrorKind::kFixtureMiss:
    case ErrorKind::kRemoteJudgeUnavailable:
    case ErrorKind::kScorerUnavailable:
      return kBackendFailure;
    case ErrorKind::kDegenerateLabels:
    case ErrorKind::kEmptyBatch:
      return kDegenerateData;
    default:
      return kUsage;
  }
}

void add_io(CLI::App* app, uq::Common& c) {
  app->add_option("input", c.input, "Input JSONL file, or - for stdin")->capture_default_str();
  app->add_option("-o,--output", c.output, "Output file, or - for stdout")->capture_default_str();
}

void add_backend(CLI::App* app, uq::Common& c) {
  app->add_option("--backend", c.backend, "auto, mock or http")
      ->check(CLI::IsMember({"auto", "mock", "http"}))
      ->capture_default_str();
  app->add_option("--mock-fixture", c.mock_fixture, "Scripted responses for the mock backend")
      ->check(CLI::ExistingFile);
  app->add_option("--api-base", c.api_base, "Chat/completions base URL (UQ_API_BASE overrides)");
  app->add_option("--api-key", c.api_key, "Bearer token (UQ_API_KEY overrides)");
  app->add_option("--model", c.model, "Model name sent to the server")->capture_default_str();
  app->add_option("--workers", c.workers, "Maximum concurrent requests")->capture_default_str();
  app->add_option("--timeout", c.timeout_s, "Per-request timeout in seconds")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-entropy uncertainty toolkit"};
  app.set_config("--config", "", "TOML key-value config file; flags and environment override it");
  app.require_subcommand(1);

  uq::Common common;
  uq::SampleArgs sample_args;
  uq::EntropyArgs entropy_args;
  uq::ReportArgs report_args;
  uq::EvalArgs eval_args;
  uq::DpoArgs dpo_args;

  auto* sample = app.add_subcommand("sample", "Draw m generations per context");
  add_io(sample, common);
  add_backend(sample, common);
  sample->add_option("--m", sample_args.m, "Samples per context")->capture_default_str();
  sample->add_option("--temperature", sample_args.temperature)->capture_default_str();
  sample->add_option("--top-p", sample_args.top_p)->capture_default_str();
  sample->add_option("--max-tokens", sample_args.max_tokens)->capture_default_str();
  sample->add_flag("--allow-missing-logprobs", sample_args.allow_missing_logprobs,
                   "Keep samples that come back without token log-probabilities");

  auto* entropy = app.add_subcommand("entropy", "Cluster samples and estimate semantic entropy");
  add_io(entropy, common);
  entropy->add_option("--judge", entropy_args.judge, "binary_rule, normalized_exact or remote_nli")
      ->capture_default_str();
  entropy->add_option("--nli-url", entropy_args.nli_url, "Endpoint for the remote_nli judge");
  entropy->add_option("--estimator", entropy_args.estimator, "discrete, rao_blackwell, within_only or combined")
      ->check(CLI::IsMember({"discrete", "rao_blackwell", "within_only", "combined"}))
      ->capture_default_str();
  entropy->add_flag("--all-estimators", entropy_args.all_estimators, "Report every estimator");
  entropy->add_flag("--length-normalized", entropy_args.length_normalized, "Average token log-probs");
  entropy->add_flag("--bits", entropy_args.bits, "Report bits instead of nats");
  entropy->add_option("--timeout", common.timeout_s, "Per-request timeout in seconds")->capture_default_str();

  auto* report = app.add_subcommand("report", "Sentence-level reliability for generated reports");
  add_io(report, common);
  add_backend(report, common);
  report->add_option("--probes-per-sentence", report_args.probes_per_sentence,
                     "Probe count, or an increasing list such as 1,2,3,4,5")
      ->delimiter(',')
      ->capture_default_str();
  report->add_option("--answers-per-probe", report_args.answers_per_probe)->capture_default_str();
  report->add_option("--thresholds", report_args.thresholds, "HIGH,LOW entropy cut points in nats")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  report->add_option("--estimator", report_args.estimator, "within_only or combined")
      ->check(CLI::IsMember({"within_only", "combined"}))
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "AUROC with bootstrap intervals, optionally over an ablation grid");
  add_io(eval, common);
  add_backend(eval, common);
  eval->add_option("--metric", eval_args.metric)->check(CLI::IsMember({"auroc"}))->capture_default_str();
  eval->add_option("--boot", eval_args.boot, "Bootstrap resamples")->capture_default_str();
  eval->add_option("--seed", eval_args.seed, "Bootstrap seed")->required();
  eval->add_option("--ablate", eval_args.ablate, "m or probes")->check(CLI::IsMember({"m", "probes"}));
  eval->add_option("--m-values", eval_args.m_values)->delimiter(',')->capture_default_str();
  eval->add_option("--probes-values", eval_args.probes_values)->delimiter(',')->capture_default_str();
  eval->add_option("--estimators", eval_args.estimators, "Restrict to these estimators")->delimiter(',');
  eval->add_option("--judge", eval_args.judge)->capture_default_str();
  eval->add_option("--nli-url", eval_args.nli_url);
  eval->add_option("--format", eval_args.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  eval->add_option("--temperature", eval_args.temperature)->capture_default_str();
  eval->add_option("--top-p", eval_args.top_p)->capture_default_str();
  eval->add_option("--answers-per-probe", eval_args.answers_per_probe)->capture_default_str();

  auto* dpo = app.add_subcommand("dpo", "Preference pairs and DPO losses");
  add_io(dpo, common);
  dpo->add_option("--beta", dpo_args.beta)->capture_default_str();
  dpo->add_option("--min-gap", dpo_args.min_gap, "Minimum winner-loser score gap")->capture_default_str();
  dpo->add_option("--score", dpo_args.score, "token_f1 or external")
      ->check(CLI::IsMember({"token_f1", "external"}))
      ->capture_default_str();
  dpo->add_option("--labeler-url", dpo_args.labeler_url, "Endpoint for the external scorer");
  dpo->add_option("--timeout", common.timeout_s, "Per-request timeout in seconds")->capture_default_str();

  auto* calibrate = app.add_subcommand("calibrate-thresholds", "Fit reliability cut points to labeled entropies");
  add_io(calibrate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*sample) return uq::run_sample(common, sample_args);
    if (*entropy) return uq::run_entropy(common, entropy_args);
    if (*report) return uq::run_report(common, report_args);
    if (*eval) return uq::run_eval(common, eval_args);
    if (*dpo) return uq::run_dpo(common, dpo_args);
    if (*calibrate) return uq::run_calibrate(common);
  } catch (const semuq::Error& e) {
    std::cerr << "uq: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const semuq::TransientError& e) {
    std::cerr << "uq: error: " << e.what() << '\n';
    return kBackendFailure;
  } catch (const std::exception& e) {
    std::cerr << "uq: error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
