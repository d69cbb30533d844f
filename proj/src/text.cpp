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

#include "semuq/text.hpp"

#include <array>
#include <cctype>

namespace semuq {

namespace {

constexpr std::array<std::string_view, 5> kYesLexicon = {"yes", "yeah", "correct", "true",
                                                         "present"};
constexpr std::array<std::string_view, 5> kNoLexicon = {"no", "not", "absent", "false",
                                                        "negative"};

// Checked in order; negative phrases first so "there are no" never matches
// the positive "there are".
constexpr std::array<std::string_view, 9> kNoPhrases = {
    "there is no", "there are no", "no evidence", "not present", "not seen",
    "not visible", "is absent",    "are absent",  "without"};
constexpr std::array<std::string_view, 7> kYesPhrases = {
    "there is a", "there is an", "there are", "is present", "are present", "is seen",
    "is visible"};

bool contains_phrase(std::string_view haystack, std::string_view phrase) {
  // Whole-word containment on a normalized, single-spaced string.
  std::size_t pos = 0;
  while ((pos = haystack.find(phrase, pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
    const std::size_t end = pos + phrase.size();
    const bool right_ok = end == haystack.size() || haystack[end] == ' ';
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  const std::string norm = normalize_text(text);
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    tokens.emplace_back(norm.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

AnswerLabel normalize_answer(std::string_view text) {
  const std::string norm = normalize_text(text);
  if (norm.empty()) return AnswerLabel::kUnknown;

  const std::string_view lead = std::string_view(norm).substr(0, norm.find(' '));
  for (auto word : kYesLexicon) {
    if (lead == word) return AnswerLabel::kYes;
  }
  for (auto word : kNoLexicon) {
    if (lead == word) return AnswerLabel::kNo;
  }
  for (auto phrase : kNoPhrases) {
    if (contains_phrase(norm, phrase)) return AnswerLabel::kNo;
  }
  for (auto phrase : kYesPhrases) {
    if (contains_phrase(norm, phrase)) return AnswerLabel::kYes;
  }
  return AnswerLabel::kUnknown;
}

}  // namespace semuq
