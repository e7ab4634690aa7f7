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

#include "agents/transport.hpp"

#include <httplib.h>

#include "common/digest.hpp"
#include "common/error.hpp"

namespace memeanno::agents {

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::Config, "malformed URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    HttpResponse out;
    UrlParts parts;
    try {
      parts = split_url(request.url);
    } catch (const Error& e) {
      out.error = e.what();
      return out;
    }
    httplib::Client client(parts.scheme_host_port);
    const auto secs = static_cast<time_t>(request.timeout_s);
    const auto usecs = static_cast<time_t>((request.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto res = client.Post(parts.path, headers, request.body, "application/json");
    if (!res) {
      out.error = "transport: " + httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

HttpRequest build_request(const AgentConfig& agent, const RenderedPrompt& prompt,
                          const std::string& meme_id, const std::string& credential) {
  HttpRequest req;
  req.url = agent.endpoint_url;
  req.timeout_s = agent.request_timeout_s;
  std::string image_b64;
  if (!prompt.image_file.empty()) image_b64 = base64_encode(read_file_bytes(prompt.image_file));
  const bool has_image = !image_b64.empty();

  OrderedJson body;
  switch (agent.provider) {
    case Provider::Generic: {
      body["model"] = agent.model_id;
      body["temperature"] = agent.temperature;
      body["max_tokens"] = agent.max_tokens;
      body["prompt"] = prompt.text;
      body["image"] = has_image ? OrderedJson{{"media_type", prompt.image_media_type},
                                              {"data_base64", image_b64}}
                                : OrderedJson(nullptr);
      body["metadata"] = {{"meme_id", meme_id}, {"agent", agent.name}};
      if (!credential.empty()) req.headers.emplace_back("Authorization", "Bearer " + credential);
      break;
    }
    case Provider::OpenAI: {
      OrderedJson content = OrderedJson::array();
      content.push_back({{"type", "text"}, {"text", prompt.text}});
      if (has_image) {
        content.push_back(
            {{"type", "image_url"},
             {"image_url", {{"url", "data:" + prompt.image_media_type + ";base64," + image_b64}}}});
      }
      body["model"] = agent.model_id;
      body["temperature"] = agent.temperature;
      body["max_tokens"] = agent.max_tokens;
      body["messages"] = OrderedJson::array({{{"role", "user"}, {"content", content}}});
      req.headers.emplace_back("Authorization", "Bearer " + credential);
      break;
    }
    case Provider::Anthropic: {
      OrderedJson content = OrderedJson::array();
      if (has_image) {
        content.push_back({{"type", "image"},
                           {"source",
                            {{"type", "base64"},
                             {"media_type", prompt.image_media_type},
                             {"data", image_b64}}}});
      }
      content.push_back({{"type", "text"}, {"text", prompt.text}});
      body["model"] = agent.model_id;
      body["max_tokens"] = agent.max_tokens;
      body["temperature"] = agent.temperature;
      body["messages"] = OrderedJson::array({{{"role", "user"}, {"content", content}}});
      req.headers.emplace_back("x-api-key", credential);
      req.headers.emplace_back("anthropic-version", "2023-06-01");
      break;
    }
    case Provider::Gemini: {
      OrderedJson parts = OrderedJson::array();
      parts.push_back({{"text", prompt.text}});
      if (has_image) {
        parts.push_back(
            {{"inline_data", {{"mime_type", prompt.image_media_type}, {"data", image_b64}}}});
      }
      body["contents"] = OrderedJson::array({{{"role", "user"}, {"parts", parts}}});
      body["generationConfig"] = {{"temperature", agent.temperature},
                                  {"maxOutputTokens", agent.max_tokens}};
      req.headers.emplace_back("x-goog-api-key", credential);
      break;
    }
  }
  req.body = body.dump();
  return req;
}

std::optional<std::string> extract_text(Provider provider, const std::string& body) {
  const Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    switch (provider) {
      case Provider::Generic:
        return j.at("text").get<std::string>();
      case Provider::OpenAI:
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      case Provider::Anthropic: {
        std::string out;
        for (const auto& block : j.at("content")) {
          if (block.value("type", "") == "text") out += block.at("text").get<std::string>();
        }
        return out;
      }
      case Provider::Gemini: {
        std::string out;
        for (const auto& part : j.at("candidates").at(0).at("content").at("parts")) {
          if (part.contains("text")) out += part.at("text").get<std::string>();
        }
        return out;
      }
    }
  } catch (const Json::exception&) {
  }
  return std::nullopt;
}

}  // namespace memeanno::agents
