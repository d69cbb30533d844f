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

#include <cstdint>
#include <string>
#include <vector>

namespace uq {

// Settings shared by every subcommand.
struct Common {
  std::string input = "-";   // "-" reads stdin
  std::string output = "-";  // "-" writes stdout
  std::string backend = "auto";  // auto | mock | http
  std::string mock_fixture;
  std::string api_base;
  std::string api_key;
  std::string model = "default";
  int workers = 8;
  double timeout_s = 60.0;
};

struct SampleArgs {
  int m = 10;
  double temperature = 1.0;
  double top_p = 0.9;
  int max_tokens = 256;
  bool allow_missing_logprobs = false;
};

struct EntropyArgs {
  std::string judge = "binary_rule";
  std::string nli_url;
  std::string estimator = "combined";
  bool all_estimators = false;
  bool length_normalized = false;
  bool bits = false;
};

struct ReportArgs {
  std::vector<int> probes_per_sentence = {5};
  int answers_per_probe = 3;
  std::vector<double> thresholds = {0.25, 0.55};
  std::string estimator = "combined";
};

struct EvalArgs {
  std::string metric = "auroc";
  std::size_t boot = 1000;
  std::uint64_t seed = 0;  // mandatory on the command line
  std::string ablate;  // empty, "m" or "probes"
  std::vector<int> m_values = {5, 10, 20};
  std::vector<int> probes_values = {1, 2, 3, 4, 5};
  std::vector<std::string> estimators;
  std::string judge = "binary_rule";
  std::string nli_url;
  std::string format = "csv";
  // Sampling and report knobs used by ablations.
  double temperature = 1.0;
  double top_p = 0.9;
  int answers_per_probe = 3;
};

struct DpoArgs {
  double beta = 0.1;
  double min_gap = 0.0;
  std::string score = "token_f1";
  std::string labeler_url;
};

int run_sample(const Common& common, const SampleArgs& args);
int run_entropy(const Common& common, const EntropyArgs& args);
int run_report(const Common& common, const ReportArgs& args);
int run_eval(const Common& common, const EvalArgs& args);
int run_dpo(const Common& common, const DpoArgs& args);
int run_calibrate(const Common& common);

}  // namespace uq
