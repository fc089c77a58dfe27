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

#include "kapr/edit_script.hpp"

#include <algorithm>
#include <limits>

namespace kapr {
namespace {

// suffix[i][j] = distance between a[i..] and b[j..].
class SuffixTable {
 public:
  SuffixTable(std::string_view a, std::string_view b)
      : a_(a), b_(b), cols_(b.size() + 1), cells_((a.size() + 1) * (b.size() + 1)) {
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    for (std::size_t i = m + 1; i-- > 0;) {
      for (std::size_t j = n + 1; j-- > 0;) {
        if (i == m) {
          cell(i, j) = n - j;
        } else if (j == n) {
          cell(i, j) = m - i;
        } else {
          std::size_t best = std::min(at(i + 1, j), at(i, j + 1)) + 1;
          best = std::min(best, at(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1));
          if (transposable(i, j)) best = std::min(best, at(i + 2, j + 2) + 1);
          cell(i, j) = best;
        }
      }
    }
  }

  std::size_t at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }

  bool transposable(std::size_t i, std::size_t j) const {
    return i + 1 < a_.size() && j + 1 < b_.size() && a_[i] != b_[j] && a_[i] == b_[j + 1] &&
           a_[i + 1] == b_[j];
  }

 private:
  std::size_t& cell(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }

  std::string_view a_;
  std::string_view b_;
  std::size_t cols_;
  std::vector<std::size_t> cells_;
};

}  // namespace

std::size_t EditStep::a_len() const {
  switch (op) {
    case EditOp::kTranspose: return 2;
    case EditOp::kInsert: return 0;
    default: return 1;
  }
}

std::size_t EditStep::b_len() const {
  switch (op) {
    case EditOp::kTranspose: return 2;
    case EditOp::kDelete: return 0;
    default: return 1;
  }
}

std::size_t osa_distance(std::string_view a, std::string_view b) {
  return SuffixTable(a, b).at(0, 0);
}

std::vector<EditStep> edit_script(std::string_view a, std::string_view b) {
  const SuffixTable table(a, b);
  std::vector<EditStep> steps;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    const std::size_t here = table.at(i, j);
    // Greedy walk in op priority order along optimal continuations yields the
    // lexicographically smallest minimal script.
    if (i < a.size() && j < b.size() && a[i] == b[j] && table.at(i + 1, j + 1) == here) {
      steps.push_back({EditOp::kMatch, i, j});
      ++i;
      ++j;
    } else if (i < a.size() && j < b.size() && table.transposable(i, j) &&
               table.at(i + 2, j + 2) + 1 == here) {
      steps.push_back({EditOp::kTranspose, i, j});
      i += 2;
      j += 2;
    } else if (i < a.size() && table.at(i + 1, j) + 1 == here) {
      steps.push_back({EditOp::kDelete, i, j});
      ++i;
    } else if (j < b.size() && table.at(i, j + 1) + 1 == here) {
      steps.push_back({EditOp::kInsert, i, j});
      ++j;
    } else {
      steps.push_back({EditOp::kSubstitute, i, j});
      ++i;
      ++j;
    }
  }
  return steps;
}

double normalized_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(osa_distance(a, b)) / static_cast<double>(longest);
}

}  // namespace kapr
