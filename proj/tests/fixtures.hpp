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

#include <memory>
#include <random>
#include <string>

#include "kapr/dataset.hpp"
#include "kapr/kapr_score.hpp"

namespace kapr::testing {

inline std::string data_path(const std::string& name) {
  return std::string(KAPR_TEST_DATA_DIR) + "/" + name;
}

inline Schema table3_schema() {
  return Schema({{"Name", AttributeKind::kVarString, AttributeRole::kIdentifier, {}},
                 {"DOB", AttributeKind::kDate, AttributeRole::kQuasiIdentifier, {}},
                 {"Race", AttributeKind::kCategory, AttributeRole::kQuasiIdentifier, {}},
                 {"Income", AttributeKind::kVarString, AttributeRole::kSensitive, {}}},
                "ID");
}

inline const char* table3_csv() {
  return "ID,Name,DOB,Race,Income\n"
         "1,Mary,08/09/1964,Hispanic,\"69,426\"\n"
         "2,Mark,08/09/1964,Hispanic,\"38,001\"\n"
         "3,Mary,09/08/1964,Black,\"27,998\"\n"
         "4,Mary,09/08/1964,Black,\"27,989\"\n";
}

inline Dataset table3() { return load_dataset(table3_csv(), table3_schema()); }

// The non-sensitive view of the microdata with all six pairs displayed.
inline std::shared_ptr<const PartialDisplay> table3_display(
    DateGranularity g = DateGranularity::kCharacter) {
  std::mt19937_64 rng(7);
  const auto split = pseudonymize(table3(), rng);
  auto base = split.identity_dataset();
  auto pairs = generate_pairs(base, PairPolicy::all_pairs());
  return std::make_shared<const PartialDisplay>(std::move(base), std::move(pairs), g);
}

}  // namespace kapr::testing
