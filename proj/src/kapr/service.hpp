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

// Transport-independent request dispatcher for the project API. The HTTP
// server and the C API both call Service::handle, so every entry point shares
// one authorization and persistence path.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kapr/session.hpp"

namespace kapr {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string storage;  // directory for snapshots and audit logs; empty keeps state in memory
  std::string manager_token;  // creates projects; generated when empty

  static ServiceConfig from_json(const nlohmann::json& j);
  // Reads a JSON config file (if `path` is non-empty) and applies KAPR_HOST,
  // KAPR_PORT, KAPR_STORAGE and KAPR_MANAGER_TOKEN from the environment.
  static ServiceConfig load(const std::string& path);
  void apply_environment();
  nlohmann::json to_json() const;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class Service {
 public:
  explicit Service(ServiceConfig config);

  Response handle(std::string_view method, std::string_view target, std::string_view token,
                  std::string_view body);

  const ServiceConfig& config() const { return config_; }
  std::size_t project_count() const;

 private:
  struct Slot {
    mutable std::shared_mutex mu;
    Project project;
    std::size_t persisted = 0;  // audit events already on disk
    explicit Slot(Project p) : project(std::move(p)) {}
  };

  Response route(std::string_view method, std::string_view path, std::string_view query,
                 std::string_view token, std::string_view body);
  Response create_project(std::string_view token, std::string_view body);
  std::shared_ptr<Slot> find(std::string_view id) const;
  Role authorize(const Slot& slot, std::string_view token) const;
  void persist(Slot& slot, bool snapshot);
  void load_storage();

  ServiceConfig config_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> projects_;
  std::mutex rng_mu_;
  std::uint64_t counter_ = 0;
};

std::string random_token();
int http_status(ErrorCode code);

}  // namespace kapr
