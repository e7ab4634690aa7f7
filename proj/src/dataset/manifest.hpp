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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset/labels.hpp"

namespace memeanno::dataset {

struct MemeRecord {
  std::string id;
  std::string image_path;  // relative to the manifest root
  std::string text;        // OCR text, possibly empty
  Propaganda propaganda = Propaganda::NotPropagandistic;
  std::optional<Split> split;

  friend bool operator==(const MemeRecord&, const MemeRecord&) = default;
};

struct LoadOptions {
  bool check_images = true;
};

class Manifest {
 public:
  Manifest() = default;
  Manifest(std::filesystem::path root, std::vector<MemeRecord> records, std::string digest = {});

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::vector<MemeRecord>& records() const noexcept { return records_; }
  std::vector<MemeRecord>& mutable_records() noexcept { return records_; }
  // SHA-256 of the manifest file as loaded; empty for in-memory manifests.
  const std::string& digest() const noexcept { return digest_; }

  std::size_t size() const noexcept { return records_.size(); }
  const MemeRecord* find(const std::string& id) const;
  std::filesystem::path resolve_image(const MemeRecord& record) const;

 private:
  void reindex();

  std::filesystem::path root_;
  std::vector<MemeRecord> records_;
  std::string digest_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One JSON object per line. Errors cite the offending line (and id for
// duplicates); record order is preserved.
Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& options = {});

OrderedJson to_json(const MemeRecord& record);
std::string serialize_manifest(const Manifest& manifest);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace memeanno::dataset
