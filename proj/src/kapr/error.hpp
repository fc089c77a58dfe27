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

#include <stdexcept>
#include <string>

namespace kapr {

enum class ErrorCode {
  kIngestion = 1,
  kInvalidArgument = 2,
  kPolicyViolation = 3,
  kBudgetExceeded = 4,
  kKappaFloor = 5,
  kDowngrade = 6,
  kNotFound = 7,
  kUnauthorized = 8,
  kForbidden = 9,
  kStateError = 10,
  kIo = 11,
  kInternal = 12,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above; the C
// API maps them one-to-one onto KAPR_ERR_* values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Ingestion failures name the offending row (1-based data row) and column.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& message, int row = 0, std::string column = {})
      : Error(ErrorCode::kIngestion, format(message, row, column)),
        row_(row),
        column_(std::move(column)) {}

  int row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int row,
                            const std::string& column);

  int row_;
  std::string column_;
};

}  // namespace kapr
