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

#include "kapr/pairs.hpp"

#include <charconv>

#include "kapr/edit_script.hpp"
#include "kapr/error.hpp"

namespace kapr {

std::string to_string(const CandidatePair& p) {
  return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

PairPolicy PairPolicy::similarity_at_least(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "similarity threshold must lie in [0,1]");
  }
  return {Kind::kThreshold, tau};
}

PairPolicy PairPolicy::parse(std::string_view text) {
  if (text.empty() || text == "all" || text == "all-pairs") return all_pairs();
  constexpr std::string_view kPrefix = "threshold:";
  if (text.substr(0, kPrefix.size()) == kPrefix) {
    const std::string num(text.substr(kPrefix.size()));
    std::size_t used = 0;
    double tau = -1.0;
    try {
      tau = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || num.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "bad threshold '" + num + "'");
    }
    return similarity_at_least(tau);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown pair policy '" + std::string(text) + "'");
}

std::string PairPolicy::to_string() const {
  if (kind == Kind::kAllPairs) return "all";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), threshold);
  return "threshold:" + std::string(buf, end);
}

double pair_similarity(const Dataset& base, int first, int second) {
  const auto cols = base.schema().non_sensitive();
  const auto& a = base.by_label(first);
  const auto& b = base.by_label(second);
  double total = 0.0;
  for (auto j : cols) {
    const auto& va = a.values[j];
    const auto& vb = b.values[j];
    if (!va && !vb) {
      total += 1.0;
    } else if (!va || !vb) {
      continue;
    } else if (base.schema().attribute(j).kind == AttributeKind::kCategory) {
      total += *va == *vb ? 1.0 : 0.0;
    } else {
      total += normalized_similarity(*va, *vb);
    }
  }
  return total / static_cast<double>(cols.size());
}

std::vector<CandidatePair> generate_pairs(const Dataset& base, const PairPolicy& policy) {
  if (policy.kind == PairPolicy::Kind::kThreshold &&
      !(policy.threshold >= 0.0 && policy.threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "similarity threshold must lie in [0,1]");
  }
  std::vector<CandidatePair> pairs;
  const int n = static_cast<int>(base.size());
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (policy.kind == PairPolicy::Kind::kThreshold &&
          pair_similarity(base, i, j) < policy.threshold) {
        continue;
      }
      pairs.push_back({i, j});
    }
  }
  return pairs;
}

}  // namespace kapr
