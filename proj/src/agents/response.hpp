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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agents/config.hpp"
#include "dataset/labels.hpp"

namespace memeanno::agents {

enum class ResponseStatus { Ok, ParseFailed, TransportFailed };

std::string_view token(ResponseStatus status) noexcept;

struct AgentResponse {
  std::string meme_id;
  std::string agent_name;
  std::string raw_text;
  std::optional<dataset::HateLabel> parsed;  // present iff status == Ok
  std::int64_t latency_ms = 0;
  int attempt_count = 0;
  ResponseStatus status = ResponseStatus::TransportFailed;
  std::string error;

  bool ok() const noexcept { return status == ResponseStatus::Ok; }
  friend bool operator==(const AgentResponse&, const AgentResponse&) = default;
};

OrderedJson to_json(const AgentResponse& response);
AgentResponse response_from_json(const Json& object);

// Extracts the first JSON object carrying a "coarse" field from free-form
// model output. Tokens are matched case-insensitively; a bare "other" is
// resolved through the coarse label. Parse error when nothing usable is found
// or the pair is branch-inconsistent.
dataset::HateLabel parse_response(std::string_view raw_text, Phase phase);

// The answer format the prompts request: {"coarse":"...","fine":"..."}.
std::string serialize_answer(const dataset::HateLabel& label);

}  // namespace memeanno::agents
