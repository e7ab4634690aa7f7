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

#include "common/text_table.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace memeanno {

std::size_t display_width(const std::string& utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string format_count(std::int64_t value) {
  std::string digits = std::to_string(value < 0 ? -value : value);
  for (std::size_t i = digits.size(); i > 3; i -= 3) digits.insert(i - 3, ",");
  return value < 0 ? "-" + digits : digits;
}

std::string format_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  return buf;
}

TextTable::TextTable(std::vector<std::string> header, std::vector<Align> align)
    : header_(std::move(header)), align_(std::move(align)) {
  align_.resize(header_.size(), Align::Left);
}

void TextTable::add_row(std::vector<std::string> cells) {
  cells.resize(header_.size());
  rows_.push_back({RowKind::Cells, std::move(cells)});
}

void TextTable::add_section(std::string title) {
  rows_.push_back({RowKind::Section, {std::move(title)}});
}

void TextTable::add_rule() { rows_.push_back({RowKind::Rule, {}}); }

std::string TextTable::render() const {
  std::vector<std::size_t> width(header_.size(), 0);
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = display_width(header_[c]);
  for (const auto& row : rows_) {
    if (row.kind != RowKind::Cells) continue;
    for (std::size_t c = 0; c < row.cells.size(); ++c)
      width[c] = std::max(width[c], display_width(row.cells[c]));
  }
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += header_.empty() ? 0 : 2 * (header_.size() - 1);
  for (const auto& row : rows_) {
    if (row.kind == RowKind::Section) total = std::max(total, display_width(row.cells[0]));
  }

  std::ostringstream out;
  auto emit_cells = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::size_t pad = width[c] - display_width(cells[c]);
      if (c) line += "  ";
      if (align_[c] == Align::Right) {
        line.append(pad, ' ');
        line += cells[c];
      } else {
        line += cells[c];
        line.append(pad, ' ');
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  const std::string rule(total, '-');

  emit_cells(header_);
  out << rule << '\n';
  for (const auto& row : rows_) {
    switch (row.kind) {
      case RowKind::Cells: emit_cells(row.cells); break;
      case RowKind::Section: out << row.cells[0] << '\n'; break;
      case RowKind::Rule: out << rule << '\n'; break;
    }
  }
  return out.str();
}

}  // namespace memeanno
