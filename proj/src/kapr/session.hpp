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

// A linkage project: the pseudonymized data, the display built over it, the
// disclosure state, the worker's decisions and the audit trail. Every
// mutation is recorded as an audit event, and the state is a pure fold over
// those events, so a project can be rebuilt from its log.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kapr/dataset.hpp"
#include "kapr/kapr_score.hpp"
#include "kapr/linkage.hpp"
#include "kapr/pairs.hpp"

namespace kapr {

enum class Role { kManager, kWorker };
std::string_view to_string(Role r);
Role parse_role(std::string_view text);

enum class ProjectStatus { kConfigured, kDispatched, kCompleted };
std::string_view to_string(ProjectStatus s);
ProjectStatus parse_project_status(std::string_view text);

enum class AuditAction { kConfigure, kReveal, kDecide, kExport };
std::string_view to_string(AuditAction a);
AuditAction parse_audit_action(std::string_view text);

struct AuditEvent {
  std::int64_t seq = 0;
  Role role = Role::kManager;
  AuditAction action = AuditAction::kConfigure;
  // Reveals: 0-based display row, attribute name, requested mode.
  std::optional<std::size_t> row;
  std::string attribute;
  std::optional<DisplayMode> target;
  // Decisions.
  std::optional<CandidatePair> pair;
  std::optional<Verdict> verdict;
  Rational delta;
  Rational total;
  std::int64_t timestamp_ms = 0;
  bool ok = true;
  std::string denial;  // error code name when !ok
  std::string reason;
  // Configure events: {"step": create|policy|dispatch|complete, ...settings}.
  nlohmann::json detail;

  nlohmann::json to_json() const;
  static AuditEvent from_json(const nlohmann::json& j);
};

std::vector<AuditEvent> parse_audit_log(std::string_view jsonl);
std::string to_jsonl(const std::vector<AuditEvent>& events);

struct ReplayStep {
  std::int64_t seq = 0;
  Rational delta;
  Rational total;
};

struct ReplayResult {
  DisclosureState state;
  KaprPolicy policy;
  std::vector<Decision> decisions;
  std::vector<ReplayStep> trajectory;  // one per applied reveal
};

// Folds the log over a fresh display: each accepted reveal raises its cell to
// at least the logged mode, denied reveals are skipped, configure events set
// the policy. Throws kStateError if a logged score differs from the
// recomputed one or the score ever decreases.
ReplayResult replay(std::shared_ptr<const PartialDisplay> display,
                    const std::vector<AuditEvent>& events);

// Builds the display named by the log's create event over `dataset`.
std::shared_ptr<const PartialDisplay> display_for_log(const Dataset& dataset,
                                                      const std::vector<AuditEvent>& events);

struct ProjectTokens {
  std::string manager;
  std::string worker;
};

struct ProjectSettings {
  PairPolicy pairs = PairPolicy::all_pairs();
  DateGranularity granularity = DateGranularity::kCharacter;
};

class Project {
 public:
  static Project create(std::string id, const Dataset& dataset, const ProjectSettings& settings,
                        ProjectTokens tokens, std::uint64_t seed);
  // Rebuilds a project from its snapshot and audit log.
  static Project restore(const nlohmann::json& snapshot, const std::vector<AuditEvent>& events);

  const std::string& id() const { return id_; }
  ProjectStatus status() const { return status_; }
  const KaprPolicy& policy() const { return policy_; }
  const ProjectTokens& tokens() const { return tokens_; }
  const DisclosureState& state() const { return state_; }
  const PseudonymizedSplit& split() const { return split_; }
  const std::vector<AuditEvent>& audit() const { return audit_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  Rational score() const { return score_of(state_, policy_); }

  // Manager operations.
  void set_policy(std::int64_t kappa, const Rational& budget);
  void dispatch();
  nlohmann::json export_linked(bool complete, std::uint64_t seed);

  // Worker operations. A denied reveal is audited before the error is thrown.
  nlohmann::json reveal(std::size_t row, std::string_view attribute,
                        std::optional<DisplayMode> target);
  nlohmann::json decide(const CandidatePair& pair, Verdict verdict);

  // The worker-facing view: rendered cells only, never sensitive data.
  nlohmann::json display_json() const;
  nlohmann::json summary_json() const;
  nlohmann::json snapshot() const;

 private:
  Project(std::string id, PseudonymizedSplit split, ProjectSettings settings,
          ProjectTokens tokens);

  AuditEvent& append(Role role, AuditAction action);
  void require_status(ProjectStatus s, std::string_view what) const;
  nlohmann::json cell_json(CellRef c, const std::optional<RevealPreview>& next) const;
  nlohmann::json score_json() const;

  std::string id_;
  PseudonymizedSplit split_;
  ProjectSettings settings_;
  ProjectTokens tokens_;
  ProjectStatus status_ = ProjectStatus::kConfigured;
  KaprPolicy policy_;
  std::shared_ptr<const PartialDisplay> display_;
  DisclosureState state_;
  std::vector<Decision> decisions_;
  std::vector<AuditEvent> audit_;
};

std::int64_t now_ms();

}  // namespace kapr
