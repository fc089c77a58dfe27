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

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kapr/dataset.hpp"
#include "kapr/pairs.hpp"
#include "kapr/rational.hpp"

namespace kapr {

enum class Verdict { kMatch, kNonmatch, kUncertain };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct Decision {
  CandidatePair pair;
  Verdict verdict = Verdict::kUncertain;
  std::int64_t timestamp_ms = 0;
  Rational score_at_decision;
};

// Later decisions on the same pair supersede earlier ones.
std::vector<Decision> active_decisions(const std::vector<Decision>& log);

struct Conflict {
  CandidatePair pair;
  std::string reason;
};

struct ClusterSet {
  // Clusters ordered by their smallest record label; labels sorted inside.
  std::vector<std::vector<int>> clusters;
  std::vector<Conflict> conflicts;
  std::size_t match_edges = 0;  // distinct match edges in the active set

  // Index into `clusters` for a record label.
  std::size_t cluster_of(int label) const;
  nlohmann::json conflicts_json() const;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

// Connected components of the active match edges over the records of `base`.
// Nonmatch verdicts between records that end up clustered are reported, not
// enforced; uncertain verdicts add no edge.
ClusterSet resolve(const std::vector<Decision>& decisions, std::size_t records);

struct LinkedOutput {
  std::vector<std::string> sensitive_columns;
  struct Row {
    std::int64_t cluster_id = 0;
    std::vector<Value> values;
  };
  std::vector<Row> rows;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Cluster ids are opaque sequential integers in a freshly shuffled order,
// unrelated to pseudonyms or record labels; rows are emitted in pseudonym
// order of the sensitive table.
template <class Rng>
LinkedOutput export_linked(const ClusterSet& clusters, const PseudonymizedSplit& split, Rng& rng);

LinkedOutput export_linked_with_ids(const ClusterSet& clusters, const PseudonymizedSplit& split,
                                    const std::vector<std::int64_t>& cluster_ids);

template <class Rng>
LinkedOutput export_linked(const ClusterSet& clusters, const PseudonymizedSplit& split, Rng& rng) {
  std::vector<std::int64_t> ids(clusters.clusters.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i) + 1;
  std::shuffle(ids.begin(), ids.end(), rng);
  return export_linked_with_ids(clusters, split, ids);
}

}  // namespace kapr
