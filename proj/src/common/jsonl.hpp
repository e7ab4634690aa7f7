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

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace memeanno {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

struct JsonLine {
  std::size_t line_no = 0;  // 1-based
  Json value;
};

// Blank lines are skipped. A malformed line is a schema error citing its line
// number, except for a malformed final line when `tolerate_torn_tail` is set
// (a journal append interrupted by a crash).
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path,
                                 bool tolerate_torn_tail = false);

// Write via a temp file + fsync + rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

// Append-only line journal. Each append is flushed and fsync'ed before
// returning, so an acknowledged line survives a process crash.
// Opening cuts back a torn final line left by a crash.
class AppendLog {
 public:
  AppendLog() = default;
  explicit AppendLog(const std::filesystem::path& path);
  ~AppendLog();

  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;
  AppendLog(AppendLog&& other) noexcept;
  AppendLog& operator=(AppendLog&& other) noexcept;

  void append_line(std::string_view line);
  bool is_open() const noexcept { return fd_ >= 0; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void close() noexcept;
  void drop_torn_tail();

  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mu_;
};

// Compact single-line dump; invalid UTF-8 is a hard error.
std::string dump_line(const OrderedJson& value);
std::string dump_line(const Json& value);

}  // namespace memeanno
