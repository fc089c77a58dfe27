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

#include "kapr/error.hpp"

namespace kapr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIngestion: return "ingestion";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kPolicyViolation: return "policy_violation";
    case ErrorCode::kBudgetExceeded: return "budget";
    case ErrorCode::kKappaFloor: return "kappa";
    case ErrorCode::kDowngrade: return "downgrade";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kUnauthorized: return "unauthorized";
    case ErrorCode::kForbidden: return "forbidden";
    case ErrorCode::kStateError: return "state";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

std::string IngestionError::format(const std::string& message, int row,
                                   const std::string& column) {
  std::string out = message;
  if (row > 0) out += " (row " + std::to_string(row);
  if (!column.empty()) out += (row > 0 ? ", column " : " (column ") + column;
  if (row > 0 || !column.empty()) out += ")";
  return out;
}

}  // namespace kapr
