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

// Test-only reference implementations. They share no code with the library
// paths they check.

#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kapr/anonymity.hpp"
#include "kapr/dataset.hpp"

namespace kapr::testing {

// Exhaustive search over every edit script built from match, substitute,
// delete, insert and adjacent-transposition steps. Returns the minimal cost
// and, among minimal scripts, the lexicographically smallest op string under
// M < T < D < I < S, spelled with those letters.
struct BruteScript {
  std::size_t cost = 0;
  std::string ops;
};

inline BruteScript brute_force_script(std::string_view a, std::string_view b) {
  auto rank = [](char op) {
    switch (op) {
      case 'M': return 0;
      case 'T': return 1;
      case 'D': return 2;
      case 'I': return 3;
      default: return 4;
    }
  };
  auto less = [&](const std::string& x, const std::string& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [&](char p, char q) { return rank(p) < rank(q); });
  };
  BruteScript best{a.size() + b.size() + 1, {}};
  std::string ops;
  auto explore = [&](auto&& self, std::size_t i, std::size_t j, std::size_t cost) -> void {
    if (cost > best.cost) return;
    if (i == a.size() && j == b.size()) {
      if (cost < best.cost || less(ops, best.ops)) best = {cost, ops};
      return;
    }
    auto step = [&](char op, std::size_t di, std::size_t dj, std::size_t dc) {
      ops.push_back(op);
      self(self, i + di, j + dj, cost + dc);
      ops.pop_back();
    };
    if (i + 1 < a.size() && j + 1 < b.size() && a[i] != b[j] && a[i] == b[j + 1] &&
        a[i + 1] == b[j]) {
      step('T', 2, 2, 1);
    }
    if (i < a.size()) step('D', 1, 0, 1);
    if (j < b.size()) step('I', 0, 1, 1);
    if (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) {
        step('M', 1, 1, 0);
      } else {
        step('S', 1, 1, 1);
      }
    }
  };
  explore(explore, 0, 0, 0);
  return best;
}

// Offsets of `a` (side 0) or `b` (side 1) touched by non-match steps.
inline std::vector<std::size_t> brute_force_edited(std::string_view a, std::string_view b,
                                                   int side) {
  const auto script = brute_force_script(a, b);
  std::vector<std::size_t> out;
  std::size_t i = 0, j = 0;
  for (char op : script.ops) {
    const std::size_t da = op == 'I' ? 0 : (op == 'T' ? 2 : 1);
    const std::size_t db = op == 'D' ? 0 : (op == 'T' ? 2 : 1);
    if (op != 'M') {
      if (side == 0) for (std::size_t x = 0; x < da; ++x) out.push_back(i + x);
      if (side == 1) for (std::size_t x = 0; x < db; ++x) out.push_back(j + x);
    }
    i += da;
    j += db;
  }
  return out;
}

inline std::string random_string(std::mt19937_64& rng, std::string_view alphabet,
                                 std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(len(rng), ' ');
  for (auto& c : s) c = alphabet[pick(rng)];
  return s;
}

// Random dataset with up to `max_attrs` non-sensitive attributes of mixed kinds
// over a small alphabet, plus one sensitive column.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t records, std::size_t attrs,
                              std::string_view alphabet = "abcd", double missing_rate = 0.05) {
  std::vector<Attribute> schema_attrs;
  std::uniform_int_distribution<int> kind_pick(0, 3);
  for (std::size_t j = 0; j < attrs; ++j) {
    Attribute a;
    a.name = "A" + std::to_string(j);
    a.kind = static_cast<AttributeKind>(kind_pick(rng));
    a.role = j == 0 ? AttributeRole::kIdentifier : AttributeRole::kQuasiIdentifier;
    if (a.kind == AttributeKind::kDate) a.layout = DateLayout("MM/DD/YY");
    schema_attrs.push_back(a);
  }
  schema_attrs.push_back({"S", AttributeKind::kVarString, AttributeRole::kSensitive, {}});
  Schema schema(schema_attrs);

  std::bernoulli_distribution missing(missing_rate);
  std::uniform_int_distribution<int> digit(0, 2);
  std::vector<SourceRecord> recs;
  for (std::size_t r = 0; r < records; ++r) {
    SourceRecord rec;
    rec.label = static_cast<int>(r) + 1;
    for (std::size_t j = 0; j < attrs; ++j) {
      const auto& a = schema_attrs[j];
      if (missing(rng)) {
        rec.values.emplace_back(std::nullopt);
        continue;
      }
      switch (a.kind) {
        case AttributeKind::kDate: {
          std::string d = "0" + std::to_string(1 + digit(rng)) + "/0" +
                          std::to_string(1 + digit(rng)) + "/6" + std::to_string(digit(rng));
          rec.values.emplace_back(d);
          break;
        }
        case AttributeKind::kCategory:
          rec.values.emplace_back(random_string(rng, alphabet.substr(0, 2), 1, 2));
          break;
        case AttributeKind::kFixedString:
          rec.values.emplace_back(random_string(rng, alphabet, 4, 4));
          break;
        case AttributeKind::kVarString:
          rec.values.emplace_back(random_string(rng, alphabet, 1, 5));
          break;
      }
    }
    rec.values.emplace_back("s" + std::to_string(r));
    recs.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(recs));
}

// Random disclosure drawn from a record's own values.
inline DisclosedRow random_disclosure(std::mt19937_64& rng, const Dataset& base, int label,
                               double density) {
  const auto cols = base.schema().non_sensitive();
  auto row = masked_row(base);
  std::bernoulli_distribution pick(density);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& v = base.value(label, cols[j]);
    std::vector<std::size_t> offsets;
    for (std::size_t p = 0; v && p < v->size(); ++p) {
      if (pick(rng)) offsets.push_back(p);
    }
    row.cells[j] = make_revealed_cell(v, base.schema().attribute(cols[j]), offsets);
  }
  return row;
}

}  // namespace kapr::testing
