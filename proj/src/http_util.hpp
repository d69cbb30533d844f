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

// Minimal POST helper shared by the HTTP backend, the remote NLI judge and
// the external labeler client.

#include <chrono>
#include <string>

#include "json.hpp"
#include "semuq/error.hpp"

namespace semuq::detail {

struct Url {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1" (no trailing slash)
};

Url parse_url(const std::string& url);

// POSTs `body` to base_url + path. Connection failures and 5xx responses
// throw TransientError; other non-2xx statuses throw the given permanent
// error kind. Returns the parsed JSON body.
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const std::string& bearer,
                         std::chrono::milliseconds timeout, ErrorKind permanent_error);

}  // namespace semuq::detail
