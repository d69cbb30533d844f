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

#include <string>
#include <string_view>
#include <vector>

#include "semuq/sample.hpp"

namespace semuq {

// Lowercases ASCII, drops punctuation, collapses whitespace runs to a single
// space and trims. Used for exact-match comparison and duplicate merging.
std::string normalize_text(std::string_view text);

// Whitespace tokens of normalize_text(text).
std::vector<std::string> normalized_tokens(std::string_view text);

// Maps a free-text answer to yes/no/unknown. The label depends only on
// normalize_text(text), so equal normalized texts always share a label.
AnswerLabel normalize_answer(std::string_view text);

}  // namespace semuq
