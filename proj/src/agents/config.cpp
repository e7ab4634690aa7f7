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

#include "agents/config.hpp"

#include <cstdlib>
#include <set>

#include "agents/prompt.hpp"
#include "common/error.hpp"

namespace memeanno::agents {

std::string_view token(Role role) noexcept {
  return role == Role::Annotator ? "annotator" : "consolidator";
}

std::string_view token(Phase phase) noexcept {
  return phase == Phase::Annotation ? "annotation" : "consolidation";
}

std::string_view token(Provider provider) noexcept {
  switch (provider) {
    case Provider::Generic: return "generic";
    case Provider::OpenAI: return "openai";
    case Provider::Anthropic: return "anthropic";
    case Provider::Gemini: return "gemini";
  }
  return "";
}

void validate_template(const PromptTemplate& tmpl) {
  const auto names = template_placeholders(tmpl.body);
  const bool has_candidates = names.count("candidate_labels") > 0;
  if (tmpl.phase == Phase::Annotation && has_candidates) {
    fail(ErrorKind::Template,
         "annotation template '" + tmpl.id + "' must not reference {{candidate_labels}}");
  }
  if (tmpl.phase == Phase::Consolidation && !has_candidates) {
    fail(ErrorKind::Template,
         "consolidation template '" + tmpl.id + "' must reference {{candidate_labels}}");
  }
}

std::vector<PromptTemplate> canonical_templates() {
  static const char* kAnnotation =
      "You are an expert annotator of social media memes. A meme is an image with overlaid "
      "text; the text below was extracted from the image and may be in Arabic.\n"
      "\n"
      "Annotation guidelines\n"
      "{{guidelines}}\n"
      "\n"
      "Task 1: label the meme as \"hateful\" or \"not-hateful\".\n"
      "Task 2: based on your Task 1 label, choose exactly one fine-grained category from the "
      "matching list.\n"
      "\n"
      "Meme text:\n"
      "{{meme_text}}\n"
      "\n"
      "Meme image: {{image}}\n"
      "\n"
      "Respond with a single JSON object and nothing else, for example:\n"
      "{\"coarse\": \"hateful\", \"fine\": \"mocking\"}\n";
  static const char* kConsolidation =
      "You are the consolidator for a meme annotation task. A meme is an image with overlaid "
      "text; the text below was extracted from the image and may be in Arabic. Independent "
      "annotators labeled this meme following the guidelines below. Review the meme together "
      "with their labels and choose the single label that best matches the meme.\n"
      "\n"
      "Annotation guidelines\n"
      "{{guidelines}}\n"
      "\n"
      "Meme text:\n"
      "{{meme_text}}\n"
      "\n"
      "Meme image: {{image}}\n"
      "\n"
      "Labels from the annotation phase:\n"
      "{{candidate_labels}}\n"
      "\n"
      "Task 1: decide whether the meme is \"hateful\" or \"not-hateful\".\n"
      "Task 2: based on that decision, choose exactly one fine-grained category from the "
      "matching list.\n"
      "\n"
      "Respond with a single JSON object and nothing else, for example:\n"
      "{\"coarse\": \"not-hateful\", \"fine\": \"humor\"}\n";
  return {{"annotation.v1", Phase::Annotation, kAnnotation},
          {"consolidation.v1", Phase::Consolidation, kConsolidation}};
}

AgentsConfig::AgentsConfig(std::vector<AgentConfig> agents, std::vector<PromptTemplate> templates)
    : agents_(std::move(agents)) {
  for (auto& t : canonical_templates()) templates_[t.id] = std::move(t);
  for (auto& t : templates) {
    validate_template(t);
    templates_[t.id] = std::move(t);
  }
  std::set<std::string> names;
  for (const auto& a : agents_) {
    if (a.name.empty()) fail(ErrorKind::Config, "agent without a name");
    if (!names.insert(a.name).second) fail(ErrorKind::Config, "duplicate agent name '" + a.name + "'");
    if (a.max_parallel < 1) fail(ErrorKind::Config, a.name + ": max_parallel must be >= 1");
    if (!(a.rate_limit > 0)) fail(ErrorKind::Config, a.name + ": rate_limit must be > 0");
    if (a.max_retries < 0) fail(ErrorKind::Config, a.name + ": max_retries must be >= 0");
    if (!(a.temperature >= 0)) fail(ErrorKind::Config, a.name + ": temperature must be >= 0");
    if (!(a.request_timeout_s > 0)) fail(ErrorKind::Config, a.name + ": request_timeout must be > 0");
    if (a.backoff_initial_ms < 0) fail(ErrorKind::Config, a.name + ": backoff_initial_ms must be >= 0");
    if (a.endpoint_url.rfind("http://", 0) != 0 && a.endpoint_url.rfind("https://", 0) != 0)
      fail(ErrorKind::Config, a.name + ": endpoint_url must be an http(s) URL");
    if (a.name == "consolidated" || a.name == "human" || a.name.rfind("human:", 0) == 0)
      fail(ErrorKind::Config, "agent name '" + a.name + "' is reserved");
    const auto& tmpl = prompt_template(a.prompt_template_id);
    const Phase expected = a.role == Role::Annotator ? Phase::Annotation : Phase::Consolidation;
    if (tmpl.phase != expected) {
      fail(ErrorKind::Config, a.name + ": " + std::string(token(a.role)) + " cannot use " +
                                  std::string(token(tmpl.phase)) + " template '" + tmpl.id + "'");
    }
  }
}

const AgentConfig& AgentsConfig::agent(const std::string& name) const {
  for (const auto& a : agents_) {
    if (a.name == name) return a;
  }
  fail(ErrorKind::Argument, "unknown agent '" + name + "'");
}

const PromptTemplate& AgentsConfig::prompt_template(const std::string& id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) fail(ErrorKind::Config, "unknown prompt template '" + id + "'");
  return it->second;
}

std::vector<AgentConfig> AgentsConfig::with_role(Role role) const {
  std::vector<AgentConfig> out;
  for (const auto& a : agents_) {
    if (a.role == role) out.push_back(a);
  }
  return out;
}

namespace {

template <typename T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::Config, where + ": field '" + key + "' has the wrong type");
  }
}

std::string require(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    fail(ErrorKind::Config, where + ": missing string field '" + key + "'");
  return it->get<std::string>();
}

}  // namespace

AgentsConfig parse_agents_config(const Json& doc) {
  if (!doc.is_object()) fail(ErrorKind::Config, "agents config must be a JSON object");
  std::vector<PromptTemplate> templates;
  if (const auto t = doc.find("templates"); t != doc.end()) {
    for (const auto& item : *t) {
      PromptTemplate p;
      p.id = require(item, "id", "template");
      const std::string phase = require(item, "phase", "template " + p.id);
      if (phase == "annotation") {
        p.phase = Phase::Annotation;
      } else if (phase == "consolidation") {
        p.phase = Phase::Consolidation;
      } else {
        fail(ErrorKind::Config, "template " + p.id + ": unknown phase '" + phase + "'");
      }
      if (const auto b = item.find("body"); b != item.end() && b->is_array()) {
        for (const auto& line : *b) p.body += line.get<std::string>() + "\n";
      } else {
        p.body = require(item, "body", "template " + p.id);
      }
      templates.push_back(std::move(p));
    }
  }

  std::vector<AgentConfig> agents;
  const auto list = doc.find("agents");
  if (list == doc.end() || !list->is_array())
    fail(ErrorKind::Config, "agents config needs an 'agents' array");
  for (const auto& item : *list) {
    AgentConfig a;
    a.name = require(item, "name", "agent");
    const std::string where = "agent " + a.name;
    for (const char* forbidden : {"api_key", "apikey", "key", "token", "secret"}) {
      if (item.contains(forbidden)) {
        fail(ErrorKind::Config, where + ": credentials must come from the environment (use api_key_env)");
      }
    }
    const std::string provider = get_or<std::string>(item, "provider", "generic", where);
    if (provider == "generic") {
      a.provider = Provider::Generic;
    } else if (provider == "openai") {
      a.provider = Provider::OpenAI;
    } else if (provider == "anthropic") {
      a.provider = Provider::Anthropic;
    } else if (provider == "gemini") {
      a.provider = Provider::Gemini;
    } else {
      fail(ErrorKind::Config, where + ": unknown provider '" + provider + "'");
    }
    a.endpoint_url = require(item, "endpoint_url", where);
    a.model_id = require(item, "model_id", where);
    a.api_key_env = get_or<std::string>(item, "api_key_env", "", where);
    const std::string role = require(item, "role", where);
    if (role == "annotator") {
      a.role = Role::Annotator;
    } else if (role == "consolidator") {
      a.role = Role::Consolidator;
    } else {
      fail(ErrorKind::Config, where + ": unknown role '" + role + "'");
    }
    a.prompt_template_id = get_or<std::string>(
        item, "prompt_template_id",
        a.role == Role::Annotator ? "annotation.v1" : "consolidation.v1", where);
    a.request_timeout_s = get_or<double>(item, "request_timeout", a.request_timeout_s, where);
    a.max_retries = get_or<int>(item, "max_retries", a.max_retries, where);
    a.rate_limit = get_or<double>(item, "rate_limit", a.rate_limit, where);
    a.max_parallel = get_or<int>(item, "max_parallel", a.max_parallel, where);
    a.temperature = get_or<double>(item, "temperature", a.temperature, where);
    a.backoff_initial_ms = get_or<int>(item, "backoff_initial_ms", a.backoff_initial_ms, where);
    a.max_tokens = get_or<int>(item, "max_tokens", a.max_tokens, where);
    agents.push_back(std::move(a));
  }
  return AgentsConfig(std::move(agents), std::move(templates));
}

AgentsConfig load_agents_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorKind::Config, path.string() + ": malformed JSON (" + e.what() + ")");
  }
  return parse_agents_config(doc);
}

std::string resolve_credential(const AgentConfig& agent) {
  if (agent.api_key_env.empty()) return {};
  const char* value = std::getenv(agent.api_key_env.c_str());
  if (!value || !*value) {
    fail(ErrorKind::Config, "agent '" + agent.name + "': environment variable " +
                                agent.api_key_env + " is not set");
  }
  return value;
}

}  // namespace memeanno::agents
