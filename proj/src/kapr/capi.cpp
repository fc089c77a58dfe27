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

#include "kapr/kapr.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kapr/error.hpp"
#include "kapr/kapr_score.hpp"
#include "kapr/server.hpp"
#include "kapr/service.hpp"
#include "kapr/session.hpp"
#include "kapr/state_file.hpp"

struct kapr_display {
  std::shared_ptr<const kapr::PartialDisplay> display;
};

struct kapr_state {
  kapr::DisclosureState state;
  kapr::StateFile file;
};

struct kapr_service {
  std::unique_ptr<kapr::Service> service;
};

struct kapr_server {
  std::unique_ptr<kapr::HttpServer> server;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

int fail(int code, const std::string& message) {
  last_error = message;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return KAPR_OK;
  } catch (const kapr::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(KAPR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KAPR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KAPR_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const json& j) {
  if (out != nullptr) *out = copy_string(j.dump());
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw kapr::Error(kapr::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

kapr::KaprPolicy policy_of(std::int64_t kappa, const char* budget) {
  kapr::KaprPolicy p;
  p.kappa = kappa;
  p.budget = budget == nullptr ? kapr::Rational(1) : kapr::parse_rational(budget);
  p.validate(0);
  return p;
}

kapr::Dataset load(const char* dataset_path, const char* schema_path) {
  require(dataset_path, "dataset path");
  require(schema_path, "schema path");
  return kapr::load_dataset_file(dataset_path, kapr::load_schema_file(schema_path));
}

}  // namespace

extern "C" {

const char* kapr_version(void) { return "0.1.0"; }

const char* kapr_status_name(int status) {
  if (status == KAPR_OK) return "ok";
  if (status < KAPR_ERR_INGESTION || status > KAPR_ERR_INTERNAL) return "unknown";
  return kapr::error_code_name(static_cast<kapr::ErrorCode>(status));
}

const char* kapr_last_error(void) { return last_error.c_str(); }

void kapr_string_free(char* s) { std::free(s); }

int kapr_validate(const char* dataset_path, const char* schema_path, char** report_json) {
  return guarded([&] {
    const auto ds = load(dataset_path, schema_path);
    const auto& schema = ds.schema();
    json attrs = json::array();
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& a = schema.attribute(j);
      json one = {{"name", a.name}, {"kind", kapr::to_string(a.kind)}, {"role", kapr::to_string(a.role)}};
      if (a.kind == kapr::AttributeKind::kDate) one["layout"] = a.layout.text();
      attrs.push_back(std::move(one));
    }
    emit(report_json, {{"N", ds.size()},
                       {"D", schema.non_sensitive().size()},
                       {"sensitive", schema.sensitive().size()},
                       {"label_column", schema.label_column()},
                       {"attributes", std::move(attrs)}});
  });
}

int kapr_display_open(const char* dataset_path, const char* schema_path, const char* pair_policy,
                      const char* granularity, kapr_display** out) {
  return guarded([&] {
    require(out, "output handle");
    const auto ds = load(dataset_path, schema_path);
    const auto policy = kapr::PairPolicy::parse(pair_policy ? pair_policy : "all");
    const auto g = kapr::parse_date_granularity(granularity ? granularity : "character");
    std::mt19937_64 rng(0);
    auto base = kapr::pseudonymize(ds, rng).identity_dataset();
    auto pairs = kapr::generate_pairs(base, policy);
    auto handle = std::make_unique<kapr_display>();
    handle->display = std::make_shared<const kapr::PartialDisplay>(std::move(base), std::move(pairs), g);
    *out = handle.release();
  });
}

void kapr_display_free(kapr_display* display) { delete display; }

size_t kapr_display_rows(const kapr_display* display) {
  return display == nullptr ? 0 : display->display->rows();
}

size_t kapr_display_attributes(const kapr_display* display) {
  return display == nullptr ? 0 : display->display->attributes();
}

int kapr_state_new(const kapr_display* display, kapr_state** out) {
  return guarded([&] {
    require(display, "display");
    require(out, "output handle");
    *out = new kapr_state{kapr::DisclosureState(display->display), {}};
  });
}

int kapr_state_load(const kapr_display* display, const char* state_path, kapr_state** out) {
  return guarded([&] {
    require(display, "display");
    require(state_path, "state path");
    require(out, "output handle");
    auto file = kapr::load_state_file(state_path);
    auto state = kapr::build_state(display->display, file);
    *out = new kapr_state{std::move(state), std::move(file)};
  });
}

void kapr_state_free(kapr_state* state) { delete state; }

int kapr_state_score(const kapr_state* state, int64_t kappa, const char* budget, char** json_out) {
  return guarded([&] {
    require(state, "state");
    const auto policy = policy_of(kappa, budget);
    const auto& s = state->state;
    const auto breakdown = kapr::kapr_score(s, policy);
    auto j = breakdown.to_json();
    j["over_budget"] = breakdown.total > policy.budget;
    json k = json::array();
    for (std::size_t i = 0; i < s.rows(); ++i) k.push_back(s.k(i));
    j["k"] = std::move(k);
    if (!state->file.pinned_k.empty()) {
      const auto pinned = kapr::kapr_score(kapr::pinned_matrix(s, state->file), policy);
      json diffs = json::array();
      for (const auto& [row, pk] : state->file.pinned_k) {
        if (static_cast<std::int64_t>(s.k(row)) != pk) {
          diffs.push_back({{"row", row + 1}, {"pinned", pk}, {"computed", s.k(row)}});
        }
      }
      json rows = json::array();
      for (const auto& r : pinned.rows) rows.push_back(kapr::rational_json(r));
      j["pinned"] = {{"K", kapr::rational_json(pinned.total)},
                     {"rows", std::move(rows)},
                     {"differences", std::move(diffs)}};
    }
    emit(json_out, j);
  });
}

int kapr_state_cells(const kapr_state* state, char** json_out) {
  return guarded([&] {
    require(state, "state");
    const auto& s = state->state;
    const auto& d = s.display();
    json rows = json::array();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      json cells = json::array();
      for (std::size_t j = 0; j < s.attributes(); ++j) {
        const auto cell = s.cell({i, j});
        cells.push_back({{"attribute", d.attribute(j).name},
                         {"text", cell.rendered},
                         {"mode", kapr::to_string(s.mode({i, j}))},
                         {"p", kapr::rational_json(s.p({i, j}))}});
      }
      const auto& pair = d.pair_of(i);
      rows.push_back({{"row", i + 1},
                      {"pair", {pair.first, pair.second}},
                      {"record", d.record_of(i)},
                      {"cells", std::move(cells)}});
    }
    emit(json_out, rows);
  });
}

int kapr_state_frontier(const kapr_state* state, int64_t kappa, const char* budget,
                        char** json_out) {
  return guarded([&] {
    require(state, "state");
    json out = json::array();
    for (const auto& p : kapr::precompute_frontier(state->state, policy_of(kappa, budget))) {
      json one = {{"row", p.cell.row + 1},
                  {"attribute", state->state.display().attribute(p.cell.attribute).name},
                  {"target", kapr::to_string(p.target)},
                  {"delta", kapr::rational_json(p.delta)},
                  {"new_total", kapr::rational_json(p.new_total)},
                  {"admissible", p.admissible}};
      if (p.denial) one["denial"] = kapr::error_code_name(*p.denial);
      out.push_back(std::move(one));
    }
    emit(json_out, out);
  });
}

int kapr_state_reveal(kapr_state* state, size_t row, const char* attribute, const char* target,
                      int64_t kappa, const char* budget, char** json_out) {
  return guarded([&] {
    require(state, "state");
    require(attribute, "attribute");
    const auto& d = state->state.display();
    if (row < 1 || row > d.rows()) {
      throw kapr::Error(kapr::ErrorCode::kNotFound, "row " + std::to_string(row) + " is not displayed");
    }
    const auto attr = d.find_attribute(attribute);
    if (!attr) throw kapr::Error(kapr::ErrorCode::kNotFound, std::string("unknown attribute ") + attribute);
    const kapr::CellRef cell{row - 1, *attr};
    std::optional<kapr::DisplayMode> mode;
    if (target != nullptr) {
      mode = kapr::parse_display_mode(target);
    } else {
      mode = d.next_mode(cell, state->state.mode(cell));
    }
    if (!mode) throw kapr::Error(kapr::ErrorCode::kDowngrade, "cell is already fully disclosed");
    auto r = kapr::apply_reveal(state->state, cell, *mode, policy_of(kappa, budget));
    state->state = std::move(r.state);
    emit(json_out, {{"row", row},
                    {"attribute", attribute},
                    {"text", state->state.cell(cell).rendered},
                    {"delta", kapr::rational_json(r.delta)},
                    {"K", kapr::rational_json(r.total)}});
  });
}

int kapr_replay(const char* dataset_path, const char* schema_path, const char* audit_path,
                char** json_out) {
  return guarded([&] {
    require(audit_path, "audit path");
    const auto ds = load(dataset_path, schema_path);
    std::ifstream in(audit_path, std::ios::binary);
    if (!in) throw kapr::Error(kapr::ErrorCode::kIo, std::string("cannot open audit log ") + audit_path);
    std::ostringstream text;
    text << in.rdbuf();
    const auto events = kapr::parse_audit_log(text.str());
    const auto r = kapr::replay(kapr::display_for_log(ds, events), events);
    json steps = json::array();
    for (const auto& s : r.trajectory) {
      steps.push_back({{"seq", s.seq},
                       {"delta", kapr::rational_json(s.delta)},
                       {"K", kapr::rational_json(s.total)}});
    }
    std::size_t denied = 0;
    for (const auto& e : events) denied += !e.ok;
    emit(json_out, {{"events", events.size()},
                    {"denied", denied},
                    {"steps", std::move(steps)},
                    {"decisions", r.decisions.size()},
                    {"kappa", r.policy.kappa},
                    {"budget", kapr::rational_json(r.policy.budget)},
                    {"K", kapr::rational_json(kapr::score_of(r.state, r.policy))}});
  });
}

int kapr_config_load(const char* path, char** config_json) {
  return guarded([&] {
    const auto c = kapr::ServiceConfig::load(path ? path : "");
    auto j = c.to_json();
    if (!c.manager_token.empty()) j["manager_token"] = c.manager_token;
    emit(config_json, j);
  });
}

int kapr_service_new(const char* config_json, kapr_service** out) {
  return guarded([&] {
    require(out, "output handle");
    const auto config = kapr::ServiceConfig::from_json(
        config_json ? json::parse(config_json) : json::object());
    *out = new kapr_service{std::make_unique<kapr::Service>(config)};
  });
}

void kapr_service_free(kapr_service* service) { delete service; }

int kapr_service_manager_token(const kapr_service* service, char** token) {
  return guarded([&] {
    require(service, "service");
    require(token, "output");
    *token = copy_string(service->service->config().manager_token);
  });
}

int kapr_service_handle(kapr_service* service, const char* method, const char* target,
                        const char* token, const char* body, int* http_status, char** response) {
  return guarded([&] {
    require(service, "service");
    require(method, "method");
    require(target, "target");
    const auto r = service->service->handle(method, target, token ? token : "", body ? body : "");
    if (http_status != nullptr) *http_status = r.status;
    if (response != nullptr) *response = copy_string(r.body);
  });
}

int kapr_server_start(const char* config_json, kapr_server** out) {
  return guarded([&] {
    require(out, "output handle");
    const auto config = kapr::ServiceConfig::from_json(
        config_json ? json::parse(config_json) : json::object());
    auto server = std::make_unique<kapr::HttpServer>(config);
    server->start();
    *out = new kapr_server{std::move(server)};
  });
}

int kapr_server_port(const kapr_server* server) {
  return server == nullptr ? -1 : server->server->port();
}

int kapr_server_manager_token(const kapr_server* server, char** token) {
  return guarded([&] {
    require(server, "server");
    require(token, "output");
    *token = copy_string(server->server->service().config().manager_token);
  });
}

void kapr_server_wait(kapr_server* server) {
  if (server != nullptr) server->server->wait();
}

void kapr_server_stop(kapr_server* server) {
  if (server != nullptr) server->server->stop();
}

void kapr_server_free(kapr_server* server) { delete server; }

}  // extern "C"
