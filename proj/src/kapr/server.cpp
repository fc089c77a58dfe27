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

#include "kapr/server.hpp"

#include <chrono>

#include "httplib.h"
#include "kapr/error.hpp"

namespace kapr {
namespace {

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() > kPrefix.size() && header.compare(0, kPrefix.size(), kPrefix) == 0) {
    return header.substr(kPrefix.size());
  }
  return {};
}

}  // namespace

HttpServer::HttpServer(ServiceConfig config)
    : service_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    if (!req.params.empty()) {
      std::string query;
      for (const auto& [k, v] : req.params) query += (query.empty() ? "" : "&") + k + "=" + v;
      target += "?" + query;
    }
    const auto out = service_.handle(req.method, target, bearer_token(req), req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Put(".*", handler);
  server_->Delete(".*", handler);
  server_->Patch(".*", handler);
  server_->set_payload_max_length(64 * 1024 * 1024);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  const auto& c = service_.config();
  if (c.port == 0) {
    port_ = server_->bind_to_any_port(c.host);
  } else if (server_->bind_to_port(c.host, c.port)) {
    port_ = c.port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorCode::kIo, "cannot listen on " + c.host + ":" + std::to_string(c.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpServer::wait() {
  while (server_->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace kapr
