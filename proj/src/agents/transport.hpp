// Copyright 2026 The memeanno Authors
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

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agents/config.hpp"
#include "agents/prompt.hpp"

namespace memeanno::agents {

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_s = 60.0;
};

struct HttpResponse {
  int status = 0;  // 0: no HTTP response (connect/read failure)
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

// cpp-httplib client; https endpoints go through OpenSSL.
std::shared_ptr<HttpTransport> make_http_transport();

struct UrlParts {
  std::string scheme_host_port;  // "https://api.example.com:443"
  std::string path;              // "/v1/chat?x=1"
};
UrlParts split_url(const std::string& url);

// Provider-specific request body and headers. The image (if any) is read and
// attached as base64.
HttpRequest build_request(const AgentConfig& agent, const RenderedPrompt& prompt,
                          const std::string& meme_id, const std::string& credential);

// Model text from a provider response body; nullopt when the body does not
// have the provider's shape.
std::optional<std::string> extract_text(Provider provider, const std::string& body);

}  // namespace memeanno::agents
