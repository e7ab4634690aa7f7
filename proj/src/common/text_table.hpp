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
#include <string>
#include <vector>

namespace memeanno {

enum class Align { Left, Right };

// Plain-text table with column alignment, section titles, and horizontal
// rules. Widths are measured in code points so UTF-8 cells line up.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header, std::vector<Align> align = {});

  void add_row(std::vector<std::string> cells);
  void add_section(std::string title);
  void add_rule();

  std::string render() const;

 private:
  enum class RowKind { Cells, Section, Rule };
  struct Row {
    RowKind kind;
    std::vector<std::string> cells;
  };

  std::vector<std::string> header_;
  std::vector<Align> align_;
  std::vector<Row> rows_;
};

// 1931 -> "1,931"
std::string format_count(std::int64_t value);
std::string format_fixed(double value, int precision);
std::size_t display_width(const std::string& utf8);

}  // namespace memeanno
