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

// Text format for a disclosure state:
//
//   # comment
//   <row>, <attribute>, <offsets>   row is 1-based over displayed rows,
//                                   offsets are 0-based character positions
//                                   separated by spaces, or * for the whole value
//   k, <row>, <size>                pins a row's anonymity set size
//
// Pinned sizes do not change the live state; they feed a second score so a
// hand-computed table can be compared with the computed one.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kapr/kapr_score.hpp"

namespace kapr {

struct StateEntry {
  std::size_t line = 0;
  std::size_t row = 0;  // 0-based
  std::string attribute;
  std::optional<std::vector<std::size_t>> offsets;  // nullopt: whole value
};

struct StateFile {
  std::vector<StateEntry> entries;
  std::map<std::size_t, std::int64_t> pinned_k;  // 0-based row -> size
};

StateFile parse_state_file(std::string_view text);
StateFile load_state_file(const std::string& path);

DisclosureState build_state(std::shared_ptr<const PartialDisplay> display, const StateFile& file);

// The state's matrix with pinned anonymity set sizes substituted.
DisclosureMatrix pinned_matrix(const DisclosureState& state, const StateFile& file);

}  // namespace kapr
