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

#include "agents/response.hpp"

#include "common/error.hpp"

namespace memeanno::agents {

std::string_view token(ResponseStatus status) noexcept {
  switch (status) {
    case ResponseStatus::Ok: return "ok";
    case ResponseStatus::ParseFailed: return "parse_failed";
    case ResponseStatus::TransportFailed: return "transport_failed";
  }
  return "";
}

OrderedJson to_json(const AgentResponse& r) {
  OrderedJson j;
  j["meme_id"] = r.meme_id;
  j["agent_name"] = r.agent_name;
  j["raw_text"] = r.raw_text;
  j["parsed"] = r.parsed ? dataset::to_json(*r.parsed) : OrderedJson(nullptr);
  j["latency_ms"] = r.latency_ms;
  j["attempt_count"] = r.attempt_count;
  j["status"] = token(r.status);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

AgentResponse response_from_json(const Json& j) {
  try {
    AgentResponse r;
    r.meme_id = j.at("meme_id").get<std::string>();
    r.agent_name = j.at("agent_name").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    if (const auto& p = j.at("parsed"); !p.is_null()) r.parsed = dataset::label_from_json(p);
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    r.attempt_count = j.at("attempt_count").get<int>();
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.status = ResponseStatus::Ok;
    } else if (status == "parse_failed") {
      r.status = ResponseStatus::ParseFailed;
    } else if (status == "transport_failed") {
      r.status = ResponseStatus::TransportFailed;
    } else {
      fail(ErrorKind::Schema, "unknown response status '" + status + "'");
    }
    r.error = j.value("error", std::string());
    if (r.ok() != r.parsed.has_value())
      fail(ErrorKind::Schema, "response status and parsed label disagree");
    return r;
  } catch (const Json::exception& e) {
    fail(ErrorKind::Schema, std::string("malformed agent response record: ") + e.what());
  }
}

namespace {

// End of the balanced {...} starting at `open`, honoring JSON strings.
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

dataset::HateLabel decode(const Json& obj, Phase phase) {
  const std::string where = std::string(token(phase)) + " response: ";
  const auto& c = obj.at("coarse");
  if (!c.is_string()) fail(ErrorKind::Parse, where + "'coarse' is not a string");
  const auto coarse = dataset::parse_coarse(c.get<std::string>());
  if (!coarse) fail(ErrorKind::Parse, where + "unknown coarse label '" + c.get<std::string>() + "'");

  std::optional<dataset::FineLabel> fine;
  if (const auto f = obj.find("fine"); f != obj.end() && !f->is_null()) {
    if (!f->is_string()) fail(ErrorKind::Parse, where + "'fine' is not a string");
    const std::string raw = f->get<std::string>();
    const std::string norm = dataset::normalize_token(raw);
    if (!norm.empty() && norm != "none" && norm != "n/a") {
      fine = dataset::parse_fine(raw, *coarse);
      if (!fine) fail(ErrorKind::Parse, where + "unknown fine label '" + raw + "'");
    }
  }
  auto label = dataset::HateLabel::try_make(*coarse, fine);
  if (!label) {
    fail(ErrorKind::Parse, where + "fine label '" + std::string(token(*fine)) +
                               "' is inconsistent with coarse label '" +
                               std::string(token(*coarse)) + "'");
  }
  return *label;
}

}  // namespace

dataset::HateLabel parse_response(std::string_view raw, Phase phase) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const std::size_t close = match_brace(raw, open);
    if (close == std::string_view::npos) continue;
    const Json obj = Json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("coarse")) continue;
    return decode(obj, phase);
  }
  fail(ErrorKind::Parse, std::string(token(phase)) + " response contains no JSON object with a 'coarse' field");
}

std::string serialize_answer(const dataset::HateLabel& label) {
  return dump_line(dataset::to_json(label));
}

}  // namespace memeanno::agents
