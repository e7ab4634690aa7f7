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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common/jsonl.hpp"

namespace memeanno::agents {

enum class Role { Annotator, Consolidator };
enum class Phase { Annotation, Consolidation };
// Wire format of the remote endpoint. `generic` is the provider-neutral body
// {model, temperature, prompt, image, metadata} answered by {"text": ...}.
enum class Provider { Generic, OpenAI, Anthropic, Gemini };

std::string_view token(Role role) noexcept;
std::string_view token(Phase phase) noexcept;
std::string_view token(Provider provider) noexcept;

struct AgentConfig {
  std::string name;
  Provider provider = Provider::Generic;
  std::string endpoint_url;
  std::string model_id;
  std::string api_key_env;  // empty: endpoint needs no credential
  Role role = Role::Annotator;
  std::string prompt_template_id;
  double request_timeout_s = 60.0;
  int max_retries = 3;
  double rate_limit = 60.0;  // requests per minute
  int max_parallel = 1;
  double temperature = 0.0;
  int backoff_initial_ms = 1000;
  int max_tokens = 512;
};

struct PromptTemplate {
  std::string id;
  Phase phase = Phase::Annotation;
  std::string body;
};

// Throws a template error when an annotation template references
// {{candidate_labels}} or a consolidation template does not.
void validate_template(const PromptTemplate& tmpl);

// Built-in templates "annotation.v1" and "consolidation.v1".
std::vector<PromptTemplate> canonical_templates();

class AgentsConfig {
 public:
  AgentsConfig() = default;
  AgentsConfig(std::vector<AgentConfig> agents, std::vector<PromptTemplate> templates);

  const std::vector<AgentConfig>& agents() const noexcept { return agents_; }
  const AgentConfig& agent(const std::string& name) const;
  const PromptTemplate& prompt_template(const std::string& id) const;
  std::vector<AgentConfig> with_role(Role role) const;

 private:
  std::vector<AgentConfig> agents_;
  std::map<std::string, PromptTemplate> templates_;
};

// Document shape: {"templates": [...], "agents": [...]}. Canonical templates
// are always available and may be overridden by id. Credentials are never
// accepted in the document.
AgentsConfig parse_agents_config(const Json& doc);
AgentsConfig load_agents_config(const std::filesystem::path& path);

// Value of the agent's credential variable. Config error when it is named but
// unset; empty when the agent declares none.
std::string resolve_credential(const AgentConfig& agent);

}  // namespace memeanno::agents
