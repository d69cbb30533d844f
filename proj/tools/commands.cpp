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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "semuq/backend.hpp"
#include "semuq/clustering.hpp"
#include "semuq/dpo.hpp"
#include "semuq/entropy.hpp"
#include "semuq/error.hpp"
#include "semuq/eval.hpp"
#include "semuq/gateway.hpp"
#include "semuq/io.hpp"
#include "semuq/report.hpp"

namespace uq {
namespace {

using nlohmann::json;
using semuq::Error;
using semuq::ErrorKind;

// Message without the "Kind: " prefix that Error prepends.
std::string bare_message(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(semuq::to_string(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

Error at_line(std::size_t line, const Error& e) {
  return Error(e.kind(), "line " + std::to_string(line) + ": " + bare_message(e));
}

void warn(const std::string& message) { std::cerr << "uq: warning: " << message << '\n'; }

// JSONL reader that tracks physical line numbers and skips blank lines.
class JsonLines {
 public:
  explicit JsonLines(const std::string& path) {
    if (path == "-") {
      in_ = &std::cin;
    } else {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::kInvalidConfig, "cannot open input '" + path + "'");
      in_ = &file_;
    }
  }

  bool next(json& out) {
    std::string text;
    while (std::getline(*in_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out = json::parse(text);
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kInvalidInput, "line " + std::to_string(line_) + ": malformed JSON");
      }
      if (!out.is_object()) {
        throw Error(ErrorKind::kInvalidInput, "line " + std::to_string(line_) + ": expected a JSON object");
      }
      if (out.contains("schema") && out.at("schema") != semuq::kSchema) {
        throw Error(ErrorKind::kInvalidInput,
                    "line " + std::to_string(line_) + ": unsupported schema " + out.at("schema").dump());
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::ifstream file_;
  std::istream* in_ = nullptr;
  std::size_t line_ = 0;
};

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") {
      out_ = &std::cout;
    } else {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::kInvalidConfig, "cannot open output '" + path + "'");
      out_ = &file_;
    }
  }
  void json_line(const json& j) { *out_ << j.dump() << '\n'; }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

// Runs fn on every input object, tagging any failure with its line number.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  JsonLines lines(path);
  json j;
  while (lines.next(j)) {
    try {
      fn(j, lines.line());
    } catch (const Error& e) {
      throw at_line(lines.line(), e);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInvalidInput, "line " + std::to_string(lines.line()) + ": " + e.what());
    }
  }
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorKind::kInvalidInput, std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kInvalidInput, std::string("field '") + name + "' has the wrong type");
  }
}

// Environment beats flags, which beat the config file.
semuq::HttpEndpoint resolve_endpoint(const Common& c) {
  semuq::HttpEndpoint ep;
  ep.base_url = c.api_base;
  ep.api_key = c.api_key;
  const auto env = semuq::HttpEndpoint::from_env();
  if (!env.base_url.empty()) ep.base_url = env.base_url;
  if (!env.api_key.empty()) ep.api_key = env.api_key;
  ep.timeout = std::chrono::milliseconds(static_cast<long long>(c.timeout_s * 1000));
  return ep;
}

semuq::HttpEndpoint service_endpoint(const std::string& url, const Common& c, const char* flag) {
  if (url.empty()) throw Error(ErrorKind::kInvalidConfig, std::string(flag) + " is required");
  semuq::HttpEndpoint ep;
  ep.base_url = url;
  ep.api_key = resolve_endpoint(c).api_key;
  ep.timeout = std::chrono::milliseconds(static_cast<long long>(c.timeout_s * 1000));
  return ep;
}

std::unique_ptr<semuq::Backend> make_backend(const Common& c) {
  std::string kind = c.backend;
  if (kind == "auto") kind = c.mock_fixture.empty() ? "http" : "mock";
  if (kind == "mock") {
    if (c.mock_fixture.empty()) throw Error(ErrorKind::kInvalidConfig, "--mock-fixture is required for the mock backend");
    return std::make_unique<semuq::MockBackend>(semuq::MockBackend::from_file(c.mock_fixture));
  }
  if (kind == "http") {
    auto ep = resolve_endpoint(c);
    if (ep.base_url.empty()) throw Error(ErrorKind::kInvalidConfig, "no API base; set --api-base or UQ_API_BASE");
    return std::make_unique<semuq::HttpBackend>(std::move(ep), c.model);
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown backend '" + c.backend + "'");
}

semuq::GatewayOptions gateway_options(const Common& c) {
  if (c.workers < 1) throw Error(ErrorKind::kInvalidConfig, "--workers must be >= 1");
  semuq::GatewayOptions g;
  g.max_in_flight = static_cast<std::size_t>(c.workers);
  return g;
}

std::unique_ptr<semuq::EquivalenceJudge> make_cli_judge(const std::string& name, const std::string& nli_url,
                                                        const Common& c) {
  const auto kind = semuq::parse_judge_kind(name);
  if (kind == semuq::JudgeKind::kRemoteNli) return semuq::make_judge(kind, service_endpoint(nli_url, c, "--nli-url"));
  return semuq::make_judge(kind);
}

semuq::ProbeContext context_of(const json& j) {
  auto ctx = j.contains("context") ? field<semuq::ProbeContext>(j, "context") : j.get<semuq::ProbeContext>();
  ctx.validate();
  return ctx;
}

semuq::EstimatorKind sentence_estimator(const std::string& name) {
  const auto kind = semuq::parse_estimator(name);
  if (kind != semuq::EstimatorKind::kWithinOnly && kind != semuq::EstimatorKind::kCombined) {
    throw Error(ErrorKind::kInvalidConfig, "sentence estimator must be within_only or combined");
  }
  return kind;
}

// Shortest round-trip rendering, identical to the JSON output.
std::string num(double v) { return json(v).dump(); }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json ci_json(const std::optional<semuq::ConfidenceInterval>& ci) {
  if (!ci) return nullptr;
  return {{"auroc", ci->point}, {"ci_lo", ci->lo}, {"ci_hi", ci->hi}};
}

}  // namespace

int run_sample(const Common& common, const SampleArgs& args) {
  semuq::SamplingConfig cfg{args.temperature, args.top_p, args.max_tokens, args.m};
  cfg.validate();
  auto opts = gateway_options(common);
  opts.require_logprobs = !args.allow_missing_logprobs;
  const auto backend = make_backend(common);
  Sink out(common.output);
  for_each_line(common.input, [&](const json& j, std::size_t) {
    out.json_line(json(semuq::sample_generations(context_of(j), cfg, *backend, opts)));
  });
  return 0;
}

int run_entropy(const Common& common, const EntropyArgs& args) {
  const auto estimator = semuq::parse_estimator(args.estimator);
  const auto judge = make_cli_judge(args.judge, args.nli_url, common);
  const semuq::ClusterOptions copts{args.length_normalized, true};
  Sink out(common.output);
  for_each_line(common.input, [&](const json& j, std::size_t line) {
    const auto set = j.get<semuq::SampleSet>();
    const auto report = semuq::entropy_report(semuq::cluster(set, *judge, copts), set.context.id);
    json row = semuq::to_json(report, args.bits);
    if (args.all_estimators) {
      if (!report.value(semuq::EstimatorKind::kCombined)) {
        warn("line " + std::to_string(line) + ": MissingLikelihoods: only the discrete estimator is available");
      }
    } else {
      const auto value = report.value(estimator);
      if (!value) {
        throw Error(ErrorKind::kMissingLikelihoods,
                    std::string(semuq::to_string(estimator)) + " needs token log-probabilities");
      }
      const std::string name = semuq::to_string(estimator);
      row["values"] = json{{name, row["values"][name]}};
      row["estimator"] = name;
      row["entropy"] = row["values"][name];
    }
    out.json_line(row);
  });
  return 0;
}

int run_report(const Common& common, const ReportArgs& args) {
  if (args.thresholds.size() != 2) throw Error(ErrorKind::kInvalidThresholds, "--thresholds takes HIGH,LOW");
  semuq::AssessOptions opts;
  opts.thresholds = {args.thresholds[0], args.thresholds[1]};
  opts.thresholds.validate();
  opts.estimator = sentence_estimator(args.estimator);
  opts.answer_config.m = args.answers_per_probe;
  opts.answer_config.validate();
  opts.gateway = gateway_options(common);
  semuq::AblationGrid{{}, args.probes_per_sentence}.validate();
  if (args.probes_per_sentence.empty()) throw Error(ErrorKind::kInvalidConfig, "--probes-per-sentence is empty");
  const auto backend = make_backend(common);
  Sink out(common.output);
  for_each_line(common.input, [&](const json& j, std::size_t) {
    const auto ctx = context_of(j);
    const auto doc = semuq::segment_report(field<std::string>(j, "report"), ctx.id);
    for (int k : args.probes_per_sentence) {
      opts.probes_per_sentence = k;
      json row = semuq::report_to_json(ctx.id, doc, semuq::assess_report(doc, ctx, *backend, opts));
      row["probes_per_sentence"] = k;
      row["estimator"] = semuq::to_string(opts.estimator);
      out.json_line(row);
    }
  });
  return 0;
}

namespace {

std::vector<semuq::EstimatorKind> parse_estimators(const std::vector<std::string>& names,
                                                   std::vector<semuq::EstimatorKind> fallback) {
  if (names.empty()) return fallback;
  std::vector<semuq::EstimatorKind> out;
  for (const auto& n : names) out.push_back(semuq::parse_estimator(n));
  return out;
}

void write_ablation(Sink& out, const EvalArgs& args, const std::vector<semuq::AblationRow>& rows) {
  if (args.format == "csv") {
    out.stream() << "knob,value,estimator,n,auroc,ci_lo,ci_hi,failure\n";
    for (const auto& r : rows) {
      out.stream() << r.knob << ',' << r.value << ',' << semuq::to_string(r.estimator) << ',' << r.n_records << ','
                   << (r.auroc ? num(r.auroc->point) : "") << ',' << (r.auroc ? num(r.auroc->lo) : "") << ','
                   << (r.auroc ? num(r.auroc->hi) : "") << ',' << csv_cell(r.failure) << '\n';
    }
    return;
  }
  json rows_json = json::array();
  for (const auto& r : rows) {
    json row = {{"knob", r.knob}, {"value", r.value}, {"estimator", semuq::to_string(r.estimator)},
                {"n", r.n_records}, {"result", ci_json(r.auroc)}};
    if (!r.failure.empty()) row["failure"] = r.failure;
    rows_json.push_back(row);
  }
  out.json_line({{"schema", semuq::kSchema}, {"metric", args.metric}, {"boot", args.boot}, {"seed", args.seed},
                 {"rows", rows_json}});
}

}  // namespace

int run_eval(const Common& common, const EvalArgs& args) {
  if (args.metric != "auroc") throw Error(ErrorKind::kInvalidConfig, "unsupported metric '" + args.metric + "'");
  if (args.format != "csv" && args.format != "json") throw Error(ErrorKind::kInvalidConfig, "--format is csv or json");

  semuq::AblationOptions opts;
  opts.n_boot = args.boot;
  opts.seed = args.seed;
  opts.gateway = gateway_options(common);
  opts.sampling.temperature = args.temperature;
  opts.sampling.top_p = args.top_p;
  opts.assess.answer_config.m = args.answers_per_probe;
  opts.assess.gateway = opts.gateway;

  if (args.ablate == "m") {
    semuq::AblationGrid{args.m_values, {}}.validate();
    const auto estimators = parse_estimators(args.estimators, {std::begin(semuq::kAllEstimators),
                                                               std::end(semuq::kAllEstimators)});
    const auto judge = make_cli_judge(args.judge, args.nli_url, common);
    std::vector<semuq::QaItem> data;
    for_each_line(common.input, [&](const json& j, std::size_t) {
      data.push_back({context_of(j), field<std::string>(j, "reference")});
    });
    const auto backend = make_backend(common);
    Sink out(common.output);
    write_ablation(out, args, semuq::run_m_ablation(data, args.m_values, estimators, *judge, *backend, opts));
    return 0;
  }
  if (args.ablate == "probes") {
    semuq::AblationGrid{{}, args.probes_values}.validate();
    const auto estimators = parse_estimators(
        args.estimators, {semuq::EstimatorKind::kWithinOnly, semuq::EstimatorKind::kCombined});
    std::vector<semuq::ReportItem> data;
    for_each_line(common.input, [&](const json& j, std::size_t) {
      data.push_back({context_of(j), field<std::string>(j, "report"), field<std::vector<bool>>(j, "sentence_correct")});
    });
    const auto backend = make_backend(common);
    Sink out(common.output);
    write_ablation(out, args, semuq::run_probes_ablation(data, args.probes_values, estimators, *backend, opts));
    return 0;
  }
  if (!args.ablate.empty()) throw Error(ErrorKind::kInvalidConfig, "--ablate is m or probes");

  // Plain records: one AUROC per estimator present in the input.
  std::map<semuq::EstimatorKind, std::vector<semuq::EvalRecord>> groups;
  for_each_line(common.input, [&](const json& j, std::size_t) {
    auto r = j.get<semuq::EvalRecord>();
    groups[r.estimator].push_back(std::move(r));
  });
  if (groups.empty()) throw Error(ErrorKind::kInvalidInput, "no records");
  const auto wanted = parse_estimators(args.estimators, {});
  std::vector<std::pair<semuq::EstimatorKind, semuq::ConfidenceInterval>> cis;
  for (const auto& [kind, records] : groups) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), kind) == wanted.end()) continue;
    cis.emplace_back(kind, semuq::bootstrap_ci(records, args.boot, args.seed));
  }
  Sink out(common.output);
  json results = json::array();
  if (args.format == "csv") out.stream() << "metric,estimator,n,auroc,ci_lo,ci_hi\n";
  for (const auto& [kind, ci] : cis) {
    const auto n = groups[kind].size();
    if (args.format == "csv") {
      out.stream() << args.metric << ',' << semuq::to_string(kind) << ',' << n << ',' << num(ci.point) << ','
                   << num(ci.lo) << ',' << num(ci.hi) << '\n';
    } else {
      results.push_back({{"estimator", semuq::to_string(kind)}, {"n", n}, {"result", ci_json(ci)}});
    }
  }
  if (args.format == "json") {
    out.json_line({{"schema", semuq::kSchema}, {"metric", args.metric}, {"boot", args.boot}, {"seed", args.seed},
                   {"results", results}});
  }
  return 0;
}

int run_dpo(const Common& common, const DpoArgs& args) {
  const semuq::DpoConfig cfg{args.beta};
  if (!(args.beta > 0.0)) throw Error(ErrorKind::kInvalidConfig, "--beta must be > 0");
  if (!(args.min_gap >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "--min-gap must be >= 0");
  std::unique_ptr<semuq::ReportScorer> scorer;
  if (args.score == "token_f1") {
    scorer = std::make_unique<semuq::TokenF1Scorer>();
  } else if (args.score == "external") {
    scorer = std::make_unique<semuq::ExternalLabelerScorer>(service_endpoint(args.labeler_url, common, "--labeler-url"));
  } else {
    throw Error(ErrorKind::kInvalidConfig, "--score is token_f1 or external");
  }

  Sink out(common.output);
  std::vector<semuq::PreferencePair> pairs;
  std::size_t skipped = 0;
  for_each_line(common.input, [&](const json& j, std::size_t line) {
    semuq::PreferencePair pair;
    if (j.contains("winner")) {
      pair = j.get<semuq::PreferencePair>();
    } else {
      const auto id = field<std::string>(j, "prompt_id");
      auto candidates = field<std::vector<semuq::ScoredGeneration>>(j, "candidates");
      if (j.contains("reference")) {
        const auto reference = field<std::string>(j, "reference");
        for (auto& c : candidates) c.score = semuq::score_generation(c.text, reference, *scorer);
      }
      const auto built = semuq::build_pairs(id, candidates, args.min_gap);
      if (!built) {
        warn("line " + std::to_string(line) + ": prompt '" + id + "' has no score gap above " + num(args.min_gap) +
             "; no pair emitted");
        ++skipped;
        return;
      }
      pair = *built;
    }
    json row = pair;
    row["margin"] = semuq::dpo_margin(pair, cfg);
    row["loss"] = semuq::dpo_loss(pair, cfg);
    out.json_line(row);
    pairs.push_back(std::move(pair));
  });

  json summary = {{"pairs", pairs.size()}, {"skipped", skipped}, {"beta", args.beta}, {"mean_loss", nullptr}};
  if (!pairs.empty()) summary["mean_loss"] = semuq::dpo_batch_loss(pairs, cfg).mean_loss;
  out.json_line({{"schema", semuq::kSchema}, {"summary", summary}});
  return 0;
}

int run_calibrate(const Common& common) {
  std::vector<semuq::LabeledEntropy> labeled;
  for_each_line(common.input, [&](const json& j, std::size_t) {
    const auto entropy = field<double>(j, "entropy");
    if (!std::isfinite(entropy) || entropy < 0.0) throw Error(ErrorKind::kInvalidInput, "entropy must be >= 0");
    labeled.push_back({entropy, semuq::parse_reliability(field<std::string>(j, "level"))});
  });
  const auto fit = semuq::calibrate_thresholds(labeled);
  Sink out(common.output);
  out.json_line({{"schema", semuq::kSchema},
                 {"theta_high", fit.thresholds.theta_high},
                 {"theta_low", fit.thresholds.theta_low},
                 {"balanced_accuracy", fit.balanced_accuracy},
                 {"n", labeled.size()}});
  return 0;
}

}  // namespace uq
