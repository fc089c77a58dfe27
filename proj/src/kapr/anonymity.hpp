//
// Copyright 2026 The kaprlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "kapr/dataset.hpp"

namespace kapr {

// What one attribute of a displayed row discloses: the true characters at
// given offsets of the underlying value. When every data character is visible
// the value is known outright, so its length becomes part of the constraint.
struct RevealedCell {
  std::vector<std::pair<std::size_t, char>> chars;  // sorted by offset
  bool complete = false;
  std::size_t length = 0;

  bool empty() const { return chars.empty(); }
  friend bool operator==(const RevealedCell&, const RevealedCell&) = default;
};

// One displayed row, one cell per non-sensitive attribute of the base
// dataset (in Dataset::schema().non_sensitive() order).
struct DisclosedRow {
  std::vector<RevealedCell> cells;
};

// Builds the revealed cell for `value` with the given offsets visible.
RevealedCell make_revealed_cell(const Value& value, const Attribute& attribute,
                                const std::vector<std::size_t>& offsets);

DisclosedRow masked_row(const Dataset& base);

bool is_consistent(const SourceRecord& candidate, const DisclosedRow& row, const Dataset& base);

// Reference implementation: scans every record.
std::size_t anonymity_set_size_scan(const DisclosedRow& row, const Dataset& base);

// Inverted index over (attribute, offset, character) and (attribute, value
// length); counts by intersecting record bitsets.
class AnonymityIndex {
 public:
  explicit AnonymityIndex(const Dataset& base);

  std::size_t anonymity_set_size(const DisclosedRow& row) const;
  std::size_t records() const { return records_; }

 private:
  using Bits = std::vector<std::uint64_t>;

  struct AttributeIndex {
    // offset -> byte -> records having that byte at that offset
    std::vector<std::vector<Bits>> by_char;
    std::vector<Bits> by_length;
  };

  const Bits* char_bits(std::size_t attr, std::size_t offset, char c) const;
  const Bits* length_bits(std::size_t attr, std::size_t length) const;

  std::size_t records_ = 0;
  std::size_t words_ = 0;
  std::vector<AttributeIndex> attributes_;
};

}  // namespace kapr
