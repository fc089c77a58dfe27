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
#include <string>
#include <string_view>
#include <vector>

#include "kapr/dataset.hpp"

namespace kapr {

// A displayed pair of records; pair m (0-based) occupies display rows 2m and
// 2m + 1, showing `first` then `second`.
struct CandidatePair {
  int first = 0;
  int second = 0;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
  friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

std::string to_string(const CandidatePair& p);  // "(1,2)"

struct PairPolicy {
  enum class Kind { kAllPairs, kThreshold };
  Kind kind = Kind::kAllPairs;
  double threshold = 0.0;

  static PairPolicy all_pairs() { return {}; }
  static PairPolicy similarity_at_least(double tau);
  // "all" or "threshold:<tau>".
  static PairPolicy parse(std::string_view text);
  std::string to_string() const;
};

// Mean normalized edit similarity over the non-sensitive attributes. Two
// missing values count as equal, one missing value as fully different, and
// categories compare whole values.
double pair_similarity(const Dataset& base, int first, int second);

std::vector<CandidatePair> generate_pairs(const Dataset& base, const PairPolicy& policy);

}  // namespace kapr
