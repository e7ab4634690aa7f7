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

#include "agents/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "common/digest.hpp"
#include "common/error.hpp"

namespace memeanno::agents {

using dataset::CoarseLabel;
using dataset::FineLabel;

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return std::string(s.substr(a, b - a + 1));
}

std::string render_candidates(const std::vector<dataset::HateLabel>& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    out += "Annotator " + std::to_string(i + 1) + ": coarse=" + std::string(token(c.coarse()));
    out += ", fine=";
    out += c.fine() ? std::string(token(*c.fine())) : std::string("none");
    if (i + 1 < candidates.size()) out += '\n';
  }
  return out;
}

}  // namespace

std::set<std::string> template_placeholders(std::string_view body) {
  std::set<std::string> names;
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string_view::npos) {
    const auto end = body.find("}}", pos + 2);
    if (end == std::string_view::npos) fail(ErrorKind::Template, "unterminated '{{' in template");
    names.insert(trim(body.substr(pos + 2, end - pos - 2)));
    pos = end + 2;
  }
  return names;
}

std::string guidelines_text() {
  std::string out;
  auto family = [&](CoarseLabel coarse, auto members, const char* heading) {
    out += std::string(display_name(coarse)) + ": " + std::string(definition(coarse)) + "\n";
    out += heading;
    out += '\n';
    for (FineLabel f : members) {
      std::string answer(token(f));
      if (f == FineLabel::OtherHateful || f == FineLabel::OtherNotHateful) answer = "other";
      out += "- " + std::string(display_name(f)) + " (\"" + answer + "\"): " +
             std::string(definition(f)) + "\n";
    }
  };
  family(CoarseLabel::Hateful, dataset::kHatefulFamily, "Fine-grained hateful categories:");
  out += '\n';
  family(CoarseLabel::NotHateful, dataset::kNotHatefulFamily, "Fine-grained not-hateful categories:");
  out.pop_back();
  return out;
}

std::string media_type_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "image/jpeg";
}

RenderedPrompt render_prompt(const PromptTemplate& tmpl, const dataset::MemeRecord& meme,
                             const std::filesystem::path& image_file,
                             const std::vector<dataset::HateLabel>* candidates) {
  validate_template(tmpl);
  if (tmpl.phase == Phase::Annotation && candidates) {
    fail(ErrorKind::Argument, "annotation prompts do not take candidate labels");
  }
  if (tmpl.phase == Phase::Consolidation && (!candidates || candidates->empty())) {
    fail(ErrorKind::Argument, "consolidation prompt for \"" + meme.id + "\" needs candidate labels");
  }

  RenderedPrompt out;
  out.image_digest = "none";
  if (!image_file.empty()) {
    std::ifstream probe(image_file, std::ios::binary);
    if (probe) {
      out.image_file = image_file;
      out.image_media_type = media_type_for(image_file);
      out.image_digest = sha256_file_hex(image_file);
    }
  }
  const std::string image_ref = out.image_file.empty()
                                    ? std::string("(no image available)")
                                    : "(attached: " + image_file.filename().string() + ")";

  const std::string_view body = tmpl.body;
  std::size_t pos = 0;
  while (true) {
    const auto open = body.find("{{", pos);
    if (open == std::string_view::npos) {
      out.text.append(body.substr(pos));
      break;
    }
    out.text.append(body.substr(pos, open - pos));
    const auto close = body.find("}}", open + 2);
    if (close == std::string_view::npos) fail(ErrorKind::Template, "unterminated '{{' in template");
    const std::string name = trim(body.substr(open + 2, close - open - 2));
    if (name == "meme_text") {
      out.text += meme.text;
    } else if (name == "image") {
      out.text += image_ref;
    } else if (name == "guidelines") {
      out.text += guidelines_text();
    } else if (name == "candidate_labels") {
      out.text += render_candidates(*candidates);
    } else {
      fail(ErrorKind::Template, "unknown placeholder {{" + name + "}} in template '" + tmpl.id + "'");
    }
    pos = close + 2;
  }
  out.prompt_hash = sha256_hex(out.text + "\n" + out.image_digest);
  return out;
}

}  // namespace memeanno::agents
