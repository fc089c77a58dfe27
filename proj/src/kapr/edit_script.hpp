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
#include <string_view>
#include <vector>

namespace kapr {

// Restricted Damerau-Levenshtein (optimal string alignment): insertions,
// deletions, substitutions and transpositions of adjacent characters, each at
// unit cost, with no character edited twice.

enum class EditOp : char {
  kMatch = 'M',
  kTranspose = 'T',
  kDelete = 'D',
  kInsert = 'I',
  kSubstitute = 'S',
};

struct EditStep {
  EditOp op;
  std::size_t a_pos;  // first character of `a` consumed by the step
  std::size_t b_pos;

  std::size_t a_len() const;
  std::size_t b_len() const;
  friend bool operator==(const EditStep&, const EditStep&) = default;
};

std::size_t osa_distance(std::string_view a, std::string_view b);

// Minimal-cost edit script turning `a` into `b`. Among all minimal scripts the
// one whose op sequence is lexicographically smallest under M < T < D < I < S
// is returned: characters are matched as early as possible (so edits land on
// the later of equal characters), transpositions win over substitute pairs,
// and deletions from `a` precede insertions of `b`.
std::vector<EditStep> edit_script(std::string_view a, std::string_view b);

// 1 - distance / max(|a|, |b|); 1 for two empty strings.
double normalized_similarity(std::string_view a, std::string_view b);

}  // namespace kapr
