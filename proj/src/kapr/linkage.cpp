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

#include "kapr/linkage.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "kapr/error.hpp"

namespace kapr {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kMatch: return "match";
    case Verdict::kNonmatch: return "nonmatch";
    case Verdict::kUncertain: return "uncertain";
  }
  return "?";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "match") return Verdict::kMatch;
  if (text == "nonmatch" || text == "non-match") return Verdict::kNonmatch;
  if (text == "uncertain") return Verdict::kUncertain;
  throw Error(ErrorCode::kInvalidArgument, "unknown verdict '" + std::string(text) + "'");
}

std::vector<Decision> active_decisions(const std::vector<Decision>& log) {
  std::map<CandidatePair, Decision> latest;
  for (const auto& d : log) latest.insert_or_assign(d.pair, d);
  std::vector<Decision> out;
  out.reserve(latest.size());
  for (auto& [pair, d] : latest) out.push_back(std::move(d));
  return out;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

std::size_t ClusterSet::cluster_of(int label) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (std::binary_search(clusters[c].begin(), clusters[c].end(), label)) return c;
  }
  throw Error(ErrorCode::kNotFound, "record " + std::to_string(label) + " is in no cluster");
}

nlohmann::json ClusterSet::conflicts_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : conflicts) {
    out.push_back({{"pair", {c.pair.first, c.pair.second}}, {"reason", c.reason}});
  }
  return out;
}

ClusterSet resolve(const std::vector<Decision>& decisions, std::size_t records) {
  const auto active = active_decisions(decisions);
  auto check = [&](const CandidatePair& p) {
    if (p.first < 1 || p.second < 1 || static_cast<std::size_t>(p.first) > records ||
        static_cast<std::size_t>(p.second) > records || p.first >= p.second) {
      throw Error(ErrorCode::kNotFound, "unknown pair " + to_string(p));
    }
  };
  DisjointSets sets(records);
  ClusterSet out;
  for (const auto& d : active) {
    check(d.pair);
    if (d.verdict != Verdict::kMatch) continue;
    ++out.match_edges;
    sets.unite(static_cast<std::size_t>(d.pair.first - 1), static_cast<std::size_t>(d.pair.second - 1));
  }
  std::map<std::size_t, std::vector<int>> by_root;
  for (std::size_t r = 0; r < records; ++r) by_root[sets.find(r)].push_back(static_cast<int>(r) + 1);
  for (auto& [root, members] : by_root) out.clusters.push_back(std::move(members));
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (const auto& d : active) {
    if (d.verdict != Verdict::kNonmatch) continue;
    if (sets.find(static_cast<std::size_t>(d.pair.first - 1)) ==
        sets.find(static_cast<std::size_t>(d.pair.second - 1))) {
      out.conflicts.push_back({d.pair, "nonmatch verdict contradicted by transitive matches"});
    }
  }
  return out;
}

LinkedOutput export_linked_with_ids(const ClusterSet& clusters, const PseudonymizedSplit& split,
                                    const std::vector<std::int64_t>& cluster_ids) {
  if (cluster_ids.size() != clusters.clusters.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one cluster id per cluster is required");
  }
  std::unordered_map<std::string, int> label_of;
  for (const auto& [label, p] : split.pseudonym_map) label_of.emplace(p, label);
  std::unordered_map<int, std::int64_t> id_of;
  std::size_t covered = 0;
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    for (int label : clusters.clusters[c]) {
      if (!split.pseudonym_map.count(label)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cluster references unknown record " + std::to_string(label));
      }
      if (!id_of.emplace(label, cluster_ids[c]).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "record " + std::to_string(label) + " appears in two clusters");
      }
      ++covered;
    }
  }
  if (covered != split.pseudonym_map.size()) {
    throw Error(ErrorCode::kInvalidArgument, "clusters do not cover every record");
  }
  LinkedOutput out;
  for (auto j : split.schema.sensitive()) out.sensitive_columns.push_back(split.schema.attribute(j).name);
  for (const auto& row : split.sensitive_table) {
    out.rows.push_back({id_of.at(label_of.at(row.pseudonym)), row.values});
  }
  return out;
}

std::string LinkedOutput::to_csv() const {
  std::string out = "cluster_id";
  for (const auto& c : sensitive_columns) out += "," + csv_escape(c);
  out += "\n";
  for (const auto& row : rows) {
    out += std::to_string(row.cluster_id);
    for (const auto& v : row.values) out += "," + (v ? csv_escape(*v) : std::string());
    out += "\n";
  }
  return out;
}

nlohmann::json LinkedOutput::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : row.values) values.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    rows_json.push_back({{"cluster_id", row.cluster_id}, {"values", std::move(values)}});
  }
  return {{"columns", sensitive_columns}, {"rows", std::move(rows_json)}};
}

}  // namespace kapr
