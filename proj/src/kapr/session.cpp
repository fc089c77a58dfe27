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

#include "kapr/session.hpp"

#include <chrono>
#include <map>
#include <random>
#include <sstream>

#include "kapr/error.hpp"

namespace kapr {
namespace {

using nlohmann::json;

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<Enum, const char*> (&names)[N],
                const char* what) {
  for (const auto& [value, name] : names) {
    if (text == name) return value;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " '" +
                                               std::string(text) + "'");
}

template <class Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<Enum, const char*> (&names)[N]) {
  for (const auto& [value, name] : names) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<Role, const char*> kRoles[] = {{Role::kManager, "manager"},
                                                   {Role::kWorker, "worker"}};
constexpr std::pair<ProjectStatus, const char*> kStatuses[] = {
    {ProjectStatus::kConfigured, "configured"},
    {ProjectStatus::kDispatched, "dispatched"},
    {ProjectStatus::kCompleted, "completed"}};
constexpr std::pair<AuditAction, const char*> kActions[] = {{AuditAction::kConfigure, "configure"},
                                                            {AuditAction::kReveal, "reveal"},
                                                            {AuditAction::kDecide, "decide"},
                                                            {AuditAction::kExport, "export"}};

json preview_json(const RevealPreview& p) {
  json j = {{"target", to_string(p.target)},
            {"delta", rational_json(p.delta)},
            {"new_total", rational_json(p.new_total)},
            {"admissible", p.admissible}};
  if (p.denial) {
    j["denial"] = error_code_name(*p.denial);
    j["reason"] = p.reason;
  }
  return j;
}

std::string step_of(const AuditEvent& e) {
  return e.action == AuditAction::kConfigure ? e.detail.value("step", "") : std::string();
}

}  // namespace

std::string_view to_string(Role r) { return enum_name(r, kRoles); }
Role parse_role(std::string_view text) { return parse_enum(text, kRoles, "role"); }
std::string_view to_string(ProjectStatus s) { return enum_name(s, kStatuses); }
ProjectStatus parse_project_status(std::string_view text) {
  return parse_enum(text, kStatuses, "project status");
}
std::string_view to_string(AuditAction a) { return enum_name(a, kActions); }
AuditAction parse_audit_action(std::string_view text) {
  return parse_enum(text, kActions, "audit action");
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// Audit events

json AuditEvent::to_json() const {
  json j = {{"seq", seq},
            {"role", to_string(role)},
            {"action", to_string(action)},
            {"delta", to_fraction_string(delta)},
            {"K", to_fraction_string(total)},
            {"K_decimal", to_decimal_string(total)},
            {"timestamp_ms", timestamp_ms},
            {"outcome", ok ? "ok" : "denied"}};
  if (row) j["row"] = *row + 1;
  if (!attribute.empty()) j["attribute"] = attribute;
  if (target) j["target"] = to_string(*target);
  if (pair) j["pair"] = {pair->first, pair->second};
  if (verdict) j["verdict"] = to_string(*verdict);
  if (!ok) {
    j["denial"] = denial;
    j["reason"] = reason;
  }
  if (!detail.is_null()) j["detail"] = detail;
  return j;
}

AuditEvent AuditEvent::from_json(const json& j) {
  try {
    AuditEvent e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.role = parse_role(j.at("role").get<std::string>());
    e.action = parse_audit_action(j.at("action").get<std::string>());
    if (j.contains("row")) {
      const auto r = j.at("row").get<std::int64_t>();
      if (r < 1) throw Error(ErrorCode::kInvalidArgument, "audit row must be positive");
      e.row = static_cast<std::size_t>(r - 1);
    }
    e.attribute = j.value("attribute", "");
    if (j.contains("target")) e.target = parse_display_mode(j.at("target").get<std::string>());
    if (j.contains("pair")) {
      e.pair = CandidatePair{j.at("pair").at(0).get<int>(), j.at("pair").at(1).get<int>()};
    }
    if (j.contains("verdict")) e.verdict = parse_verdict(j.at("verdict").get<std::string>());
    e.delta = parse_rational(j.at("delta").get<std::string>());
    e.total = parse_rational(j.at("K").get<std::string>());
    e.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    e.ok = j.at("outcome").get<std::string>() == "ok";
    e.denial = j.value("denial", "");
    e.reason = j.value("reason", "");
    if (j.contains("detail")) e.detail = j.at("detail");
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kIngestion, std::string("malformed audit event: ") + ex.what());
  }
}

std::vector<AuditEvent> parse_audit_log(std::string_view jsonl) {
  std::vector<AuditEvent> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    const auto line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(AuditEvent::from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kIngestion,
                  "audit log line " + std::to_string(line_no) + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ErrorCode::kIngestion,
                  "audit log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

std::string to_jsonl(const std::vector<AuditEvent>& events) {
  std::string out;
  for (const auto& e : events) out += e.to_json().dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Replay

ReplayResult replay(std::shared_ptr<const PartialDisplay> display,
                    const std::vector<AuditEvent>& events) {
  ReplayResult out{DisclosureState(display), KaprPolicy{}, {}, {}};
  Rational prev = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const auto where = "audit event " + std::to_string(e.seq);
    if (e.seq != static_cast<std::int64_t>(i) + 1) {
      throw Error(ErrorCode::kStateError, where + " is out of sequence");
    }
    if (!e.ok) continue;
    switch (e.action) {
      case AuditAction::kConfigure:
        if (step_of(e) == "policy") {
          out.policy.kappa = e.detail.at("kappa").get<std::int64_t>();
          out.policy.budget = parse_rational(e.detail.at("budget").get<std::string>());
          prev = score_of(out.state, out.policy);
        }
        break;
      case AuditAction::kReveal: {
        if (!e.row || !e.target) throw Error(ErrorCode::kStateError, where + " names no cell");
        const auto attr = display->find_attribute(e.attribute);
        if (!attr || *e.row >= display->rows()) {
          throw Error(ErrorCode::kStateError, where + " names a cell outside the display");
        }
        const CellRef cell{*e.row, *attr};
        out.state = out.state.with_revealed(cell, display->offsets_for(cell, *e.target), *e.target);
        const Rational k = score_of(out.state, out.policy);
        if (k != e.total) {
          throw Error(ErrorCode::kStateError, where + " logged K = " + to_fraction_string(e.total) +
                                                  " but replay gives " + to_fraction_string(k));
        }
        if (k < prev) throw Error(ErrorCode::kStateError, where + " decreases K");
        out.trajectory.push_back({e.seq, k - prev, k});
        prev = k;
        break;
      }
      case AuditAction::kDecide:
        if (!e.pair || !e.verdict) {
          throw Error(ErrorCode::kStateError, where + " names no pair or verdict");
        }
        out.decisions.push_back({*e.pair, *e.verdict, e.timestamp_ms, e.total});
        break;
      case AuditAction::kExport:
        break;
    }
  }
  return out;
}

std::shared_ptr<const PartialDisplay> display_for_log(const Dataset& dataset,
                                                      const std::vector<AuditEvent>& events) {
  ProjectSettings settings;
  for (const auto& e : events) {
    if (step_of(e) == "create") {
      settings.pairs = PairPolicy::parse(e.detail.value("pairs", "all"));
      settings.granularity = parse_date_granularity(e.detail.value("granularity", "character"));
      break;
    }
  }
  std::mt19937_64 rng(0);
  auto base = pseudonymize(dataset, rng).identity_dataset();
  auto pairs = generate_pairs(base, settings.pairs);
  return std::make_shared<const PartialDisplay>(std::move(base), std::move(pairs),
                                                settings.granularity);
}

// ---------------------------------------------------------------------------
// Project

Project::Project(std::string id, PseudonymizedSplit split, ProjectSettings settings,
                 ProjectTokens tokens)
    : id_(std::move(id)),
      split_(std::move(split)),
      settings_(settings),
      tokens_(std::move(tokens)),
      display_([&] {
        auto base = split_.identity_dataset();
        auto pairs = generate_pairs(base, settings_.pairs);
        return std::make_shared<const PartialDisplay>(std::move(base), std::move(pairs),
                                                      settings_.granularity);
      }()),
      state_(display_) {}

Project Project::create(std::string id, const Dataset& dataset, const ProjectSettings& settings,
                        ProjectTokens tokens, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Project p(std::move(id), pseudonymize(dataset, rng), settings, std::move(tokens));
  auto& e = p.append(Role::kManager, AuditAction::kConfigure);
  e.detail = {{"step", "create"},
              {"pairs", settings.pairs.to_string()},
              {"granularity", to_string(settings.granularity)},
              {"records", dataset.size()},
              {"pair_count", p.display_->pairs().size()}};
  return p;
}

Project Project::restore(const json& snapshot, const std::vector<AuditEvent>& events) {
  try {
    ProjectSettings settings;
    settings.pairs = PairPolicy::parse(snapshot.at("settings").at("pairs").get<std::string>());
    settings.granularity =
        parse_date_granularity(snapshot.at("settings").at("granularity").get<std::string>());
    ProjectTokens tokens{snapshot.at("tokens").at("manager").get<std::string>(),
                         snapshot.at("tokens").at("worker").get<std::string>()};
    Project p(snapshot.at("id").get<std::string>(),
              PseudonymizedSplit::from_json(snapshot.at("split")), settings, std::move(tokens));
    auto r = replay(p.display_, events);
    p.state_ = std::move(r.state);
    p.policy_ = r.policy;
    p.decisions_ = std::move(r.decisions);
    p.audit_ = events;
    for (const auto& e : events) {
      if (!e.ok) continue;
      const auto step = step_of(e);
      if (step == "dispatch") p.status_ = ProjectStatus::kDispatched;
      if (step == "complete") p.status_ = ProjectStatus::kCompleted;
    }
    return p;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kIngestion, std::string("malformed project snapshot: ") + ex.what());
  }
}

AuditEvent& Project::append(Role role, AuditAction action) {
  AuditEvent e;
  e.seq = static_cast<std::int64_t>(audit_.size()) + 1;
  e.role = role;
  e.action = action;
  e.timestamp_ms = now_ms();
  e.total = score();
  audit_.push_back(std::move(e));
  return audit_.back();
}

void Project::require_status(ProjectStatus s, std::string_view what) const {
  if (status_ != s) {
    throw Error(ErrorCode::kStateError, std::string(what) + " requires a " +
                                            std::string(to_string(s)) + " project; this one is " +
                                            std::string(to_string(status_)));
  }
}

void Project::set_policy(std::int64_t kappa, const Rational& budget) {
  require_status(ProjectStatus::kConfigured, "setting the policy");
  const KaprPolicy next{kappa, budget};
  next.validate(state_.display().base().size());
  policy_ = next;
  auto& e = append(Role::kManager, AuditAction::kConfigure);
  e.detail = {{"step", "policy"}, {"kappa", kappa}, {"budget", to_fraction_string(budget)}};
}

void Project::dispatch() {
  require_status(ProjectStatus::kConfigured, "dispatch");
  status_ = ProjectStatus::kDispatched;
  append(Role::kManager, AuditAction::kConfigure).detail = {{"step", "dispatch"}};
}

json Project::score_json() const {
  const Rational k = score();
  return {{"K", rational_json(k)},
          {"budget", rational_json(policy_.budget)},
          {"remaining", rational_json(policy_.budget - k)},
          {"kappa", policy_.kappa}};
}

json Project::cell_json(CellRef c, const std::optional<RevealPreview>& next) const {
  const auto cell = state_.cell(c);
  json markup = json::array();
  for (const auto& m : cell.markup) {
    markup.push_back({{"kind", to_string(m.kind)}, {"token", m.token_id}, {"shown", m.shown}});
  }
  json j = {{"attribute", display_->attribute(c.attribute).name},
            {"text", cell.rendered},
            {"mode", to_string(state_.mode(c))},
            {"not_applicable", cell.not_applicable},
            {"p", rational_json(state_.p(c))},
            {"markup", std::move(markup)},
            {"next", next ? preview_json(*next) : json()}};
  return j;
}

json Project::display_json() const {
  if (status_ == ProjectStatus::kConfigured) {
    throw Error(ErrorCode::kStateError, "the project has not been dispatched");
  }
  std::map<std::pair<std::size_t, std::size_t>, RevealPreview> frontier;
  for (auto& p : precompute_frontier(state_, policy_)) {
    frontier.emplace(std::pair{p.cell.row, p.cell.attribute}, std::move(p));
  }
  std::map<CandidatePair, Verdict> verdicts;
  for (const auto& d : active_decisions(decisions_)) verdicts[d.pair] = d.verdict;

  json attrs = json::array();
  for (std::size_t j = 0; j < display_->attributes(); ++j) attrs.push_back(display_->attribute(j).name);
  json cards = json::array();
  for (std::size_t m = 0; m < display_->pairs().size(); ++m) {
    const auto& pair = display_->pairs()[m];
    json rows = json::array();
    Rational contribution = 0;
    for (std::size_t i = 2 * m; i < 2 * m + 2; ++i) {
      json cells = json::array();
      for (std::size_t j = 0; j < display_->attributes(); ++j) {
        const auto it = frontier.find({i, j});
        cells.push_back(cell_json({i, j}, it == frontier.end()
                                              ? std::nullopt
                                              : std::optional<RevealPreview>(it->second)));
      }
      contribution += row_contribution(state_, policy_, i);
      rows.push_back({{"row", i + 1}, {"cells", std::move(cells)}});
    }
    const auto v = verdicts.find(pair);
    cards.push_back({{"pair", {pair.first, pair.second}},
                     {"rows", std::move(rows)},
                     {"contribution", rational_json(contribution)},
                     {"verdict", v == verdicts.end() ? json() : json(to_string(v->second))}});
  }
  json out = score_json();
  out["project"] = id_;
  out["status"] = to_string(status_);
  out["attributes"] = std::move(attrs);
  out["n_rows"] = display_->rows();
  out["cards"] = std::move(cards);
  return out;
}

json Project::reveal(std::size_t row, std::string_view attribute,
                     std::optional<DisplayMode> target) {
  require_status(ProjectStatus::kDispatched, "reveal");
  auto deny = [&](ErrorCode code, const std::string& reason) {
    auto& e = append(Role::kWorker, AuditAction::kReveal);
    e.row = row;
    e.attribute = std::string(attribute);
    e.target = target;
    e.ok = false;
    e.denial = error_code_name(code);
    e.reason = reason;
    return Error(code, reason);
  };
  if (row >= display_->rows()) {
    throw deny(ErrorCode::kNotFound, "row " + std::to_string(row + 1) + " is not displayed");
  }
  const auto attr = display_->find_attribute(attribute);
  if (!attr) throw deny(ErrorCode::kNotFound, "attribute '" + std::string(attribute) + "' is not displayed");
  const CellRef cell{row, *attr};
  if (!target) target = display_->next_mode(cell, state_.mode(cell));
  if (!target) throw deny(ErrorCode::kDowngrade, "cell is already fully disclosed");

  const auto preview = preview_reveal(state_, cell, *target, policy_);
  if (!preview.admissible) throw deny(*preview.denial, preview.reason);
  auto result = apply_reveal(state_, cell, *target, policy_);
  state_ = std::move(result.state);
  auto& e = append(Role::kWorker, AuditAction::kReveal);
  e.row = row;
  e.attribute = std::string(attribute);
  e.target = target;
  e.delta = result.delta;
  e.total = result.total;

  std::optional<RevealPreview> next;
  if (auto m = display_->next_mode(cell, state_.mode(cell))) {
    next = preview_reveal(state_, cell, *m, policy_);
  }
  json out = score_json();
  out["row"] = row + 1;
  out["cell"] = cell_json(cell, next);
  out["delta"] = rational_json(result.delta);
  out["seq"] = e.seq;
  return out;
}

json Project::decide(const CandidatePair& pair, Verdict verdict) {
  require_status(ProjectStatus::kDispatched, "decide");
  const auto& pairs = display_->pairs();
  if (!std::binary_search(pairs.begin(), pairs.end(), pair)) {
    throw Error(ErrorCode::kNotFound, "unknown pair " + to_string(pair));
  }
  auto& e = append(Role::kWorker, AuditAction::kDecide);
  e.pair = pair;
  e.verdict = verdict;
  decisions_.push_back({pair, verdict, e.timestamp_ms, e.total});
  json out = score_json();
  out["pair"] = {pair.first, pair.second};
  out["verdict"] = to_string(verdict);
  out["seq"] = e.seq;
  return out;
}

json Project::export_linked(bool complete, std::uint64_t seed) {
  if (status_ == ProjectStatus::kConfigured) {
    throw Error(ErrorCode::kStateError, "the project has not been dispatched");
  }
  const auto clusters = resolve(decisions_, split_.pseudonym_map.size());
  std::mt19937_64 rng(seed);
  const auto linked = kapr::export_linked(clusters, split_, rng);
  append(Role::kManager, AuditAction::kExport);
  if (complete && status_ == ProjectStatus::kDispatched) {
    status_ = ProjectStatus::kCompleted;
    append(Role::kManager, AuditAction::kConfigure).detail = {{"step", "complete"}};
  }
  json audit = json::array();
  for (const auto& e : audit_) audit.push_back(e.to_json());
  return {{"project", id_},
          {"status", to_string(status_)},
          {"linked", linked.to_json()},
          {"csv", linked.to_csv()},
          {"clusters", clusters.clusters.size()},
          {"conflicts", clusters.conflicts_json()},
          {"score", kapr_score(state_, policy_).to_json()},
          {"audit", std::move(audit)}};
}

json Project::summary_json() const {
  json out = score_json();
  out["project"] = id_;
  out["status"] = to_string(status_);
  out["records"] = split_.pseudonym_map.size();
  out["pairs"] = display_->pairs().size();
  out["n_rows"] = display_->rows();
  out["D"] = display_->attributes();
  out["pair_policy"] = settings_.pairs.to_string();
  out["granularity"] = to_string(settings_.granularity);
  return out;
}

json Project::snapshot() const {
  return {{"id", id_},
          {"status", to_string(status_)},
          {"tokens", {{"manager", tokens_.manager}, {"worker", tokens_.worker}}},
          {"settings",
           {{"pairs", settings_.pairs.to_string()},
            {"granularity", to_string(settings_.granularity)}}},
          {"policy", {{"kappa", policy_.kappa}, {"budget", to_fraction_string(policy_.budget)}}},
          {"split", split_.to_json()}};
}

}  // namespace kapr
