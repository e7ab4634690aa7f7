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

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace memeanno::metrics {

// Ordered (item id, class token) pairs over a declared class alphabet.
class LabelVector {
 public:
  LabelVector() = default;
  // Schema error on duplicate ids or tokens outside the alphabet.
  LabelVector(std::vector<std::string> alphabet,
              std::vector<std::pair<std::string, std::string>> items);

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const std::vector<std::pair<std::string, std::string>>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

  // Class token for `id`, or nullptr.
  const std::string* find(const std::string& id) const;
  bool in_alphabet(const std::string& token) const;

 private:
  std::vector<std::string> alphabet_;
  std::vector<std::pair<std::string, std::string>> items_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace memeanno::metrics
