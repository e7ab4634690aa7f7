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

#include "dataset/label_file.hpp"

#include <unordered_set>

#include "common/error.hpp"

namespace memeanno::dataset {

std::vector<LabelEntry> load_label_file(const std::filesystem::path& path,
                                        const LabelFileOptions& options) {
  std::vector<LabelEntry> out;
  std::unordered_set<std::string> seen;
  for (const auto& [line, obj] : read_jsonl(path)) {
    const std::string at = path.string() + ":" + std::to_string(line) + ": ";
    if (!obj.is_object()) fail(ErrorKind::Schema, at + "expected a JSON object");
    const auto id = obj.find("id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty())
      fail(ErrorKind::Schema, at + "missing string field 'id'");
    std::string source;
    if (const auto s = obj.find("source"); s != obj.end() && s->is_string())
      source = s->get<std::string>();
    try {
      out.push_back({id->get<std::string>(), label_from_json(obj), std::move(source)});
    } catch (const Error& e) {
      fail(ErrorKind::Schema, at + e.what());
    }
    if (!options.allow_duplicate_ids && !seen.insert(out.back().id).second)
      fail(ErrorKind::Schema, at + "duplicate id \"" + out.back().id + "\"");
  }
  return out;
}

std::string serialize_label_line(const LabelEntry& entry) {
  OrderedJson j;
  j["id"] = entry.id;
  j["coarse"] = token(entry.label.coarse());
  if (entry.label.fine()) j["fine"] = token(*entry.label.fine());
  j["source"] = entry.source;
  return dump_line(j);
}

std::string serialize_label_file(const std::vector<LabelEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += serialize_label_line(e);
    out += '\n';
  }
  return out;
}

void save_label_file(const std::vector<LabelEntry>& entries, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_label_file(entries));
}

}  // namespace memeanno::dataset
