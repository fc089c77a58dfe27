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

// C interface to the kaprlink library. Structured results are returned as
// JSON text in buffers the caller releases with kapr_string_free. Every call
// returns KAPR_OK or one of the KAPR_ERR_* codes; the message for the most
// recent failure on the calling thread is available from kapr_last_error.

#ifndef KAPR_KAPR_H_
#define KAPR_KAPR_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define KAPR_API __attribute__((visibility("default")))
#else
#define KAPR_API
#endif

typedef enum kapr_status {
  KAPR_OK = 0,
  KAPR_ERR_INGESTION = 1,
  KAPR_ERR_INVALID_ARGUMENT = 2,
  KAPR_ERR_POLICY_VIOLATION = 3,
  KAPR_ERR_BUDGET = 4,
  KAPR_ERR_KAPPA = 5,
  KAPR_ERR_DOWNGRADE = 6,
  KAPR_ERR_NOT_FOUND = 7,
  KAPR_ERR_UNAUTHORIZED = 8,
  KAPR_ERR_FORBIDDEN = 9,
  KAPR_ERR_STATE = 10,
  KAPR_ERR_IO = 11,
  KAPR_ERR_INTERNAL = 12
} kapr_status;

typedef struct kapr_display kapr_display;
typedef struct kapr_state kapr_state;
typedef struct kapr_service kapr_service;
typedef struct kapr_server kapr_server;

KAPR_API const char* kapr_version(void);
KAPR_API const char* kapr_status_name(int status);
KAPR_API const char* kapr_last_error(void);
KAPR_API void kapr_string_free(char* s);

// Loads a dataset against a schema and reports record and attribute counts.
KAPR_API int kapr_validate(const char* dataset_path, const char* schema_path, char** report_json);

// A display of candidate pairs over the non-sensitive columns of a dataset.
// pair_policy is "all" or "threshold:<tau>"; granularity is "character" or
// "element". NULL selects the defaults ("all", "character").
KAPR_API int kapr_display_open(const char* dataset_path, const char* schema_path,
                               const char* pair_policy, const char* granularity,
                               kapr_display** out);
KAPR_API void kapr_display_free(kapr_display* display);
KAPR_API size_t kapr_display_rows(const kapr_display* display);
KAPR_API size_t kapr_display_attributes(const kapr_display* display);

// Disclosure states. The display must outlive its states. Budgets are
// decimal or fraction strings; NULL means 1.
KAPR_API int kapr_state_new(const kapr_display* display, kapr_state** out);
KAPR_API int kapr_state_load(const kapr_display* display, const char* state_path,
                             kapr_state** out);
KAPR_API void kapr_state_free(kapr_state* state);
KAPR_API int kapr_state_score(const kapr_state* state, int64_t kappa, const char* budget,
                              char** json);
KAPR_API int kapr_state_cells(const kapr_state* state, char** json);
KAPR_API int kapr_state_frontier(const kapr_state* state, int64_t kappa, const char* budget,
                                 char** json);
// row is 1-based; target is "partial", "full" or NULL for the next mode.
KAPR_API int kapr_state_reveal(kapr_state* state, size_t row, const char* attribute,
                               const char* target, int64_t kappa, const char* budget,
                               char** json);

// Recomputes the score trajectory of a project audit log over a dataset.
KAPR_API int kapr_replay(const char* dataset_path, const char* schema_path,
                         const char* audit_path, char** json);

// Service configuration: file (may be NULL) plus environment overrides.
KAPR_API int kapr_config_load(const char* path, char** config_json);

// In-process request dispatcher for the project API.
KAPR_API int kapr_service_new(const char* config_json, kapr_service** out);
KAPR_API void kapr_service_free(kapr_service* service);
KAPR_API int kapr_service_manager_token(const kapr_service* service, char** token);
KAPR_API int kapr_service_handle(kapr_service* service, const char* method, const char* target,
                                 const char* token, const char* body, int* http_status,
                                 char** response);

// HTTP server running on a background thread.
KAPR_API int kapr_server_start(const char* config_json, kapr_server** out);
KAPR_API int kapr_server_port(const kapr_server* server);
KAPR_API int kapr_server_manager_token(const kapr_server* server, char** token);
KAPR_API void kapr_server_wait(kapr_server* server);
KAPR_API void kapr_server_stop(kapr_server* server);
KAPR_API void kapr_server_free(kapr_server* server);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // KAPR_KAPR_H_
