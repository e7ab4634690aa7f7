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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agents/config.hpp"
#include "dataset/manifest.hpp"

namespace memeanno::agents {

struct RenderedPrompt {
  std::string text;
  std::filesystem::path image_file;  // empty when no readable image
  std::string image_media_type;
  std::string image_digest;  // SHA-256 hex of the image bytes, or "none"
  // SHA-256 hex of text + "\n" + image_digest.
  std::string prompt_hash;
};

// Placeholder names used in `body` ({{name}}). Template error for an
// unterminated "{{".
std::set<std::string> template_placeholders(std::string_view body);

// The guideline definitions block substituted for {{guidelines}}.
std::string guidelines_text();

// Substitutes {{meme_text}}, {{image}}, {{guidelines}} and (consolidation
// only) {{candidate_labels}}. Substitution is single-pass: placeholder-like
// text inside the meme itself is left alone.
RenderedPrompt render_prompt(const PromptTemplate& tmpl, const dataset::MemeRecord& meme,
                             const std::filesystem::path& image_file,
                             const std::vector<dataset::HateLabel>* candidates = nullptr);

std::string media_type_for(const std::filesystem::path& path);

}  // namespace memeanno::agents
