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

#include "kapr/service.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "kapr/error.hpp"

namespace kapr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error_response(ErrorCode code, const std::string& message) {
  return json_response(http_status(code),
                       {{"error", {{"code", error_code_name(code)}, {"message", message}}}});
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return json::object();
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

Rational budget_of(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) return parse_rational(v.dump());
  throw Error(ErrorCode::kInvalidArgument, "budget must be a number or a fraction string");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

bool query_flag(std::string_view query, std::string_view name) {
  std::size_t pos = 0;
  while (pos <= query.size()) {
    auto amp = query.find('&', pos);
    if (amp == std::string_view::npos) amp = query.size();
    const auto item = query.substr(pos, amp - pos);
    const auto eq = item.find('=');
    const auto key = item.substr(0, eq);
    const auto value = eq == std::string_view::npos ? std::string_view("1") : item.substr(eq + 1);
    if (key == name) return value == "1" || value == "true" || value == "yes";
    pos = amp + 1;
  }
  return false;
}

}  // namespace

std::string random_token() {
  // OS entropy for every token, no seeded engine.
  static std::random_device rd;
  static std::mutex mu;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  std::lock_guard lock(mu);
  for (int w = 0; w < 4; ++w) {
    auto v = rd();
    for (int i = 0; i < 8; ++i, v >>= 4) out += kHex[v & 0xf];
  }
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIngestion:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kUnauthorized: return 401;
    case ErrorCode::kForbidden: return 403;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kDowngrade:
    case ErrorCode::kStateError: return 409;
    case ErrorCode::kPolicyViolation:
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kKappaFloor: return 422;
    case ErrorCode::kIo:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

// ---------------------------------------------------------------------------
// Configuration

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.storage = j.value("storage", c.storage);
    c.manager_token = j.value("manager_token", c.manager_token);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad configuration: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  ServiceConfig c;
  if (!path.empty()) {
    try {
      c = from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "bad configuration file " + path + ": " + e.what());
    }
  }
  c.apply_environment();
  return c;
}

void ServiceConfig::apply_environment() {
  if (const char* v = std::getenv("KAPR_HOST")) host = v;
  if (const char* v = std::getenv("KAPR_PORT")) {
    try {
      port = std::stoi(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, std::string("KAPR_PORT is not a number: ") + v);
    }
    if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "KAPR_PORT out of range");
  }
  if (const char* v = std::getenv("KAPR_STORAGE")) storage = v;
  if (const char* v = std::getenv("KAPR_MANAGER_TOKEN")) manager_token = v;
}

json ServiceConfig::to_json() const {
  return {{"host", host}, {"port", port}, {"storage", storage}};
}

// ---------------------------------------------------------------------------
// Service

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.manager_token.empty()) config_.manager_token = random_token();
  if (!config_.storage.empty()) load_storage();
}

std::size_t Service::project_count() const {
  std::shared_lock lock(mu_);
  return projects_.size();
}

void Service::load_storage() {
  std::error_code ec;
  fs::create_directories(config_.storage, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create storage directory " + config_.storage);
  for (const auto& entry : fs::directory_iterator(config_.storage)) {
    if (!entry.is_directory()) continue;
    const auto snap = entry.path() / "snapshot.json";
    if (!fs::exists(snap)) continue;
    const auto log_path = entry.path() / "audit.log";
    std::vector<AuditEvent> events;
    if (fs::exists(log_path)) events = parse_audit_log(read_file(log_path));
    json snapshot;
    try {
      snapshot = json::parse(read_file(snap));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIngestion, "corrupt snapshot " + snap.string() + ": " + e.what());
    }
    auto slot = std::make_shared<Slot>(Project::restore(snapshot, events));
    slot->persisted = events.size();
    projects_.emplace(slot->project.id(), std::move(slot));
  }
}

void Service::persist(Slot& slot, bool snapshot) {
  if (config_.storage.empty()) {
    slot.persisted = slot.project.audit().size();
    return;
  }
  const fs::path dir = fs::path(config_.storage) / slot.project.id();
  fs::create_directories(dir);
  const auto& audit = slot.project.audit();
  if (slot.persisted < audit.size()) {
    std::ofstream out(dir / "audit.log", std::ios::binary | std::ios::app);
    for (std::size_t i = slot.persisted; i < audit.size(); ++i) {
      out << audit[i].to_json().dump() << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot append to the audit log of " + slot.project.id());
    slot.persisted = audit.size();
  }
  if (snapshot) write_file_atomic(dir / "snapshot.json", slot.project.snapshot().dump(1));
}

std::shared_ptr<Service::Slot> Service::find(std::string_view id) const {
  std::shared_lock lock(mu_);
  const auto it = projects_.find(id);
  if (it == projects_.end()) throw Error(ErrorCode::kNotFound, "no project '" + std::string(id) + "'");
  return it->second;
}

Role Service::authorize(const Slot& slot, std::string_view token) const {
  if (token.empty()) throw Error(ErrorCode::kUnauthorized, "missing bearer token");
  const auto& t = slot.project.tokens();
  if (constant_time_equal(token, t.manager)) return Role::kManager;
  if (constant_time_equal(token, t.worker)) return Role::kWorker;
  throw Error(ErrorCode::kUnauthorized, "token is not valid for this project");
}

Response Service::handle(std::string_view method, std::string_view target, std::string_view token,
                         std::string_view body) {
  const auto q = target.find('?');
  const auto path = target.substr(0, q);
  const auto query = q == std::string_view::npos ? std::string_view() : target.substr(q + 1);
  try {
    return route(method, path, query, token, body);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const json::exception& e) {
    return error_response(ErrorCode::kInvalidArgument, std::string("bad request: ") + e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::kInternal, e.what());
  }
}

Response Service::create_project(std::string_view token, std::string_view body) {
  if (token.empty()) throw Error(ErrorCode::kUnauthorized, "missing bearer token");
  if (!constant_time_equal(token, config_.manager_token)) {
    throw Error(ErrorCode::kForbidden, "only a manager can create projects");
  }
  const auto req = parse_body(body);
  const auto csv = req.contains("dataset_csv") ? req.at("dataset_csv").get<std::string>()
                                               : req.at("dataset").get<std::string>();
  const auto schema = Schema::from_json(req.at("schema"));
  ProjectSettings settings;
  settings.pairs = PairPolicy::parse(req.value("pair_policy", "all"));
  settings.granularity = parse_date_granularity(req.value("granularity", "character"));
  const auto dataset = load_dataset(csv, schema);

  std::uint64_t seed = 0;
  std::string id;
  {
    std::lock_guard lock(rng_mu_);
    seed = req.contains("seed") ? req.at("seed").get<std::uint64_t>() : std::random_device{}();
    id = "p" + std::to_string(++counter_) + "-" + random_token().substr(0, 8);
  }
  auto project = Project::create(id, dataset, settings, {random_token(), random_token()}, seed);
  auto slot = std::make_shared<Slot>(std::move(project));
  {
    std::unique_lock lock(slot->mu);
    persist(*slot, true);
  }
  json out = slot->project.summary_json();
  out["manager_token"] = slot->project.tokens().manager;
  out["worker_token"] = slot->project.tokens().worker;
  {
    std::unique_lock lock(mu_);
    projects_.emplace(id, std::move(slot));
  }
  return json_response(201, out);
}

Response Service::route(std::string_view method, std::string_view path, std::string_view query,
                        std::string_view token, std::string_view body) {
  std::vector<std::string_view> parts;
  for (std::size_t pos = 0; pos < path.size();) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) parts.push_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  auto method_not_allowed = [&] {
    return json_response(405, {{"error",
                                {{"code", "method"},
                                 {"message", std::string(method) + " is not supported on " +
                                                 std::string(path)}}}});
  };
  if (parts.size() == 1 && parts[0] == "health") return json_response(200, {{"status", "ok"}});
  if (parts.empty() || parts[0] != "projects" || parts.size() > 3) {
    throw Error(ErrorCode::kNotFound, "no route for " + std::string(path));
  }
  if (parts.size() == 1) {
    if (method != "POST") return method_not_allowed();
    return create_project(token, body);
  }
  if (!valid_id(parts[1])) throw Error(ErrorCode::kNotFound, "no project '" + std::string(parts[1]) + "'");
  auto slot = find(parts[1]);
  const std::string_view action = parts.size() == 3 ? parts[2] : std::string_view();

  auto require = [](Role have, Role need) {
    if (have != need) {
      throw Error(ErrorCode::kForbidden, "this operation needs the " + std::string(to_string(need)) +
                                             " role");
    }
  };

  // Read-only views share the project lock.
  if (method == "GET" && (action.empty() || action == "display" || action == "audit")) {
    std::shared_lock lock(slot->mu);
    const Role role = authorize(*slot, token);
    if (action.empty()) return json_response(200, slot->project.summary_json());
    if (action == "display") return json_response(200, slot->project.display_json());
    require(role, Role::kManager);
    return {200, to_jsonl(slot->project.audit()), "application/x-ndjson"};
  }

  std::unique_lock lock(slot->mu);
  const Role role = authorize(*slot, token);
  auto& p = slot->project;
  // Events appended by a failing operation (denied reveals) are still persisted.
  struct Flush {
    Service* self;
    Slot* slot;
    bool snapshot = false;
    ~Flush() {
      try {
        self->persist(*slot, snapshot);
      } catch (...) {
      }
    }
  } flush{this, slot.get()};

  if (action == "policy") {
    if (method != "PUT") return method_not_allowed();
    require(role, Role::kManager);
    const auto req = parse_body(body);
    if (!req.contains("kappa") && !req.contains("budget")) {
      throw Error(ErrorCode::kInvalidArgument, "policy needs kappa and/or budget");
    }
    const auto kappa = req.contains("kappa") ? req.at("kappa").get<std::int64_t>() : p.policy().kappa;
    const auto budget = req.contains("budget") ? budget_of(req.at("budget")) : p.policy().budget;
    p.set_policy(kappa, budget);
    flush.snapshot = true;
    return json_response(200, p.summary_json());
  }
  if (action == "dispatch") {
    if (method != "POST") return method_not_allowed();
    require(role, Role::kManager);
    p.dispatch();
    flush.snapshot = true;
    return json_response(200, p.summary_json());
  }
  if (action == "reveal") {
    if (method != "POST") return method_not_allowed();
    require(role, Role::kWorker);
    const auto req = parse_body(body);
    const auto row = req.at("row").get<std::int64_t>();
    if (row < 1) throw Error(ErrorCode::kInvalidArgument, "rows are numbered from 1");
    std::optional<DisplayMode> target;
    if (req.contains("target") && !req.at("target").is_null()) {
      target = parse_display_mode(req.at("target").get<std::string>());
    }
    const auto before = p.audit().size();
    try {
      return json_response(200, p.reveal(static_cast<std::size_t>(row - 1),
                                         req.at("attribute").get<std::string>(), target));
    } catch (const Error& e) {
      auto r = error_response(e.code(), e.what());
      auto j = json::parse(r.body);
      if (p.audit().size() > before) j["error"]["seq"] = p.audit().back().seq;
      j["K"] = rational_json(p.score());
      r.body = j.dump();
      return r;
    }
  }
  if (action == "decisions") {
    if (method != "POST") return method_not_allowed();
    require(role, Role::kWorker);
    const auto req = parse_body(body);
    const auto& pr = req.at("pair");
    const CandidatePair pair{pr.at(0).get<int>(), pr.at(1).get<int>()};
    return json_response(200, p.decide(pair, parse_verdict(req.at("verdict").get<std::string>())));
  }
  if (action == "export") {
    if (method != "GET" && method != "POST") return method_not_allowed();
    require(role, Role::kManager);
    std::uint64_t seed;
    {
      std::lock_guard g(rng_mu_);
      seed = std::random_device{}();
    }
    const bool complete = query_flag(query, "complete");
    auto out = p.export_linked(complete, seed);
    flush.snapshot = complete;
    return json_response(200, out);
  }
  throw Error(ErrorCode::kNotFound, "no route for " + std::string(path));
}

}  // namespace kapr
