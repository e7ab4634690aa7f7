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

#include "dataset/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include "common/digest.hpp"
#include "common/error.hpp"

namespace memeanno::dataset {

Manifest::Manifest(std::filesystem::path root, std::vector<MemeRecord> records, std::string digest)
    : root_(std::move(root)), records_(std::move(records)), digest_(std::move(digest)) {
  reindex();
}

void Manifest::reindex() {
  index_.clear();
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) index_.emplace(records_[i].id, i);
}

const MemeRecord* Manifest::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::filesystem::path Manifest::resolve_image(const MemeRecord& record) const {
  return root_ / record.image_path;
}

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string require_string(const Json& obj, const char* field, const std::filesystem::path& path,
                           std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || !it->is_string())
    fail(ErrorKind::Schema, where(path, line) + "missing string field '" + field + "'");
  return it->get<std::string>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& options) {
  const std::string bytes = read_file_bytes(path);
  const auto lines = read_jsonl(path);
  std::vector<MemeRecord> records;
  records.reserve(lines.size());
  std::unordered_set<std::string> seen;
  const auto root = path.parent_path();

  for (const auto& [line, obj] : lines) {
    if (!obj.is_object()) fail(ErrorKind::Schema, where(path, line) + "expected a JSON object");
    MemeRecord r;
    r.id = require_string(obj, "id", path, line);
    if (r.id.empty()) fail(ErrorKind::Schema, where(path, line) + "empty id");
    if (!seen.insert(r.id).second)
      fail(ErrorKind::Schema, where(path, line) + "duplicate id \"" + r.id + "\"");
    r.image_path = require_string(obj, "image_path", path, line);
    r.text = require_string(obj, "text", path, line);

    const std::string prop = require_string(obj, "propaganda", path, line);
    const auto p = parse_propaganda(prop);
    if (!p) {
      fail(ErrorKind::Schema,
           where(path, line) + "unknown propaganda value \"" + prop + "\" for id \"" + r.id + "\"");
    }
    r.propaganda = *p;

    if (const auto s = obj.find("split"); s != obj.end() && !s->is_null()) {
      if (!s->is_string()) fail(ErrorKind::Schema, where(path, line) + "'split' must be a string");
      const auto split = parse_split(s->get<std::string>());
      if (!split) {
        fail(ErrorKind::Schema,
             where(path, line) + "unknown split value \"" + s->get<std::string>() + "\"");
      }
      r.split = *split;
    }

    if (options.check_images) {
      const auto image = root / r.image_path;
      std::ifstream probe(image, std::ios::binary);
      if (r.image_path.empty() || !probe) {
        fail(ErrorKind::Io, where(path, line) + "image for \"" + r.id +
                                "\" not readable: " + image.string());
      }
    }
    records.push_back(std::move(r));
  }
  return Manifest(root, std::move(records), sha256_hex(bytes));
}

OrderedJson to_json(const MemeRecord& record) {
  OrderedJson j;
  j["id"] = record.id;
  j["image_path"] = record.image_path;
  j["text"] = record.text;
  j["propaganda"] = token(record.propaganda);
  if (record.split) j["split"] = token(*record.split);
  return j;
}

std::string serialize_manifest(const Manifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records()) {
    out += dump_line(to_json(r));
    out += '\n';
  }
  return out;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_manifest(manifest));
}

}  // namespace memeanno::dataset
