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

#include "http_util.hpp"

#include "httplib.h"

namespace semuq::detail {

Url parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kInvalidConfig, "endpoint URL needs a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const std::string& bearer,
                         std::chrono::milliseconds timeout, ErrorKind permanent_error) {
  const Url url = parse_url(base_url);
  httplib::Client client(url.scheme_host_port);
  if (!client.is_valid()) {
    throw Error(ErrorKind::kInvalidConfig, "unsupported endpoint '" + base_url + "'");
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  if (!bearer.empty()) client.set_bearer_token_auth(bearer);

  auto res = client.Post(url.path + path, body.dump(), "application/json");
  if (!res) {
    throw TransientError("transport error contacting " + base_url + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw TransientError("server error " + std::to_string(res->status) + " from " + base_url);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(permanent_error,
                "HTTP " + std::to_string(res->status) + " from " + base_url + ": " + res->body);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kInvalidResponse, std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace semuq::detail
