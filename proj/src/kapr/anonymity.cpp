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

#include "kapr/anonymity.hpp"

#include <algorithm>
#include <bit>

#include "kapr/error.hpp"
#include "kapr/masking.hpp"

namespace kapr {

RevealedCell make_revealed_cell(const Value& value, const Attribute& attribute,
                                const std::vector<std::size_t>& offsets) {
  RevealedCell cell;
  if (!value) return cell;
  std::vector<std::size_t> sorted = offsets;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (auto p : sorted) {
    if (p >= value->size()) throw Error(ErrorCode::kInvalidArgument, "offset out of range");
    if (attribute.kind == AttributeKind::kDate && attribute.layout.is_separator(p)) continue;
    cell.chars.emplace_back(p, (*value)[p]);
  }
  cell.length = value->size();
  cell.complete = !cell.chars.empty() && cell.chars.size() == data_char_count(value, attribute);
  return cell;
}

DisclosedRow masked_row(const Dataset& base) {
  DisclosedRow row;
  row.cells.resize(base.schema().non_sensitive().size());
  return row;
}

bool is_consistent(const SourceRecord& candidate, const DisclosedRow& row, const Dataset& base) {
  const auto cols = base.schema().non_sensitive();
  if (row.cells.size() != cols.size()) {
    throw Error(ErrorCode::kInvalidArgument, "disclosed row does not match schema width");
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& cell = row.cells[j];
    if (cell.empty()) continue;
    const auto& v = candidate.values.at(cols[j]);
    if (!v) return false;
    if (cell.complete && v->size() != cell.length) return false;
    for (const auto& [pos, ch] : cell.chars) {
      if (pos >= v->size() || (*v)[pos] != ch) return false;
    }
  }
  return true;
}

std::size_t anonymity_set_size_scan(const DisclosedRow& row, const Dataset& base) {
  std::size_t k = 0;
  for (const auto& rec : base.records()) k += is_consistent(rec, row, base);
  return k;
}

AnonymityIndex::AnonymityIndex(const Dataset& base)
    : records_(base.size()), words_((base.size() + 63) / 64) {
  const auto cols = base.schema().non_sensitive();
  attributes_.resize(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    auto& idx = attributes_[j];
    for (std::size_t r = 0; r < base.size(); ++r) {
      const auto& v = base.records()[r].values[cols[j]];
      if (!v) continue;
      const std::uint64_t bit = std::uint64_t{1} << (r % 64);
      if (idx.by_char.size() < v->size()) idx.by_char.resize(v->size());
      for (std::size_t p = 0; p < v->size(); ++p) {
        auto& slot = idx.by_char[p];
        if (slot.empty()) slot.resize(256);
        auto& bits = slot[static_cast<unsigned char>((*v)[p])];
        if (bits.empty()) bits.assign(words_, 0);
        bits[r / 64] |= bit;
      }
      if (idx.by_length.size() <= v->size()) idx.by_length.resize(v->size() + 1);
      auto& len_bits = idx.by_length[v->size()];
      if (len_bits.empty()) len_bits.assign(words_, 0);
      len_bits[r / 64] |= bit;
    }
  }
}

const AnonymityIndex::Bits* AnonymityIndex::char_bits(std::size_t attr, std::size_t offset,
                                                      char c) const {
  const auto& idx = attributes_[attr];
  if (offset >= idx.by_char.size() || idx.by_char[offset].empty()) return nullptr;
  const auto& bits = idx.by_char[offset][static_cast<unsigned char>(c)];
  return bits.empty() ? nullptr : &bits;
}

const AnonymityIndex::Bits* AnonymityIndex::length_bits(std::size_t attr,
                                                        std::size_t length) const {
  const auto& idx = attributes_[attr];
  if (length >= idx.by_length.size() || idx.by_length[length].empty()) return nullptr;
  return &idx.by_length[length];
}

std::size_t AnonymityIndex::anonymity_set_size(const DisclosedRow& row) const {
  if (row.cells.size() != attributes_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "disclosed row does not match schema width");
  }
  Bits acc(words_, ~std::uint64_t{0});
  if (records_ % 64 != 0 && words_ > 0) acc.back() = (std::uint64_t{1} << (records_ % 64)) - 1;
  auto intersect = [&](const Bits* bits) {
    if (bits == nullptr) return false;
    bool any = false;
    for (std::size_t w = 0; w < words_; ++w) {
      acc[w] &= (*bits)[w];
      any |= acc[w] != 0;
    }
    return any;
  };
  for (std::size_t j = 0; j < row.cells.size(); ++j) {
    const auto& cell = row.cells[j];
    if (cell.complete && !intersect(length_bits(j, cell.length))) return 0;
    for (const auto& [pos, ch] : cell.chars) {
      if (!intersect(char_bits(j, pos, ch))) return 0;
    }
  }
  std::size_t k = 0;
  for (auto w : acc) k += static_cast<std::size_t>(std::popcount(w));
  return k;
}

}  // namespace kapr
