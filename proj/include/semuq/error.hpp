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

#include <stdexcept>
#include <string>

namespace semuq {

enum class ErrorKind {
  kInvalidConfig,
  kInvalidInput,
  kBackendUnavailable,
  kLogprobsMissing,
  kInvalidResponse,
  kFixtureMiss,
  kEmptySentence,
  kEmptyReport,
  kEmptySampleSet,
  kMissingLikelihoods,
  kRemoteJudgeUnavailable,
  kNoParseableAnswers,
  kInvalidThresholds,
  kScorerUnavailable,
  kTooFewCandidates,
  kEmptyBatch,
  kDegenerateLabels,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Retryable failure (connection refused, timeout, HTTP 5xx). Backends throw
// this; the gateway retry loop converts exhaustion into kBackendUnavailable.
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kBackendUnavailable: return "BackendUnavailable";
    case ErrorKind::kLogprobsMissing: return "LogprobsMissing";
    case ErrorKind::kInvalidResponse: return "InvalidResponse";
    case ErrorKind::kFixtureMiss: return "FixtureMiss";
    case ErrorKind::kEmptySentence: return "EmptySentence";
    case ErrorKind::kEmptyReport: return "EmptyReport";
    case ErrorKind::kEmptySampleSet: return "EmptySampleSet";
    case ErrorKind::kMissingLikelihoods: return "MissingLikelihoods";
    case ErrorKind::kRemoteJudgeUnavailable: return "RemoteJudgeUnavailable";
    case ErrorKind::kNoParseableAnswers: return "NoParseableAnswers";
    case ErrorKind::kInvalidThresholds: return "InvalidThresholds";
    case ErrorKind::kScorerUnavailable: return "ScorerUnavailable";
    case ErrorKind::kTooFewCandidates: return "TooFewCandidates";
    case ErrorKind::kEmptyBatch: return "EmptyBatch";
    case ErrorKind::kDegenerateLabels: return "DegenerateLabels";
  }
  return "Unknown";
}

}  // namespace semuq
