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
#include <thread>

#include "kapr/service.hpp"

namespace httplib {
class Server;
}

namespace kapr {

// Serves a Service over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(ServiceConfig config);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts listening; returns the bound port.
  int start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

  int port() const { return port_; }
  Service& service() { return service_; }

 private:
  Service service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace kapr
