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

// Helpers for driving the project API in process, plus the randomized
// trust-boundary harness shared by the service tests and the acceptance
// runner.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "kapr/service.hpp"
#include "kapr/session.hpp"
#include "oracles.hpp"

namespace kapr::testing {

using nlohmann::json;

struct Reply {
  int status = 0;
  std::string raw;
  json body;
};

inline Reply call(Service& svc, std::string_view method, std::string_view target,
                  std::string_view token, const json& body = json()) {
  const auto r = svc.handle(method, target, token, body.is_null() ? "" : body.dump());
  Reply out{r.status, r.body, json()};
  if (r.content_type == "application/json") out.body = json::parse(r.body);
  return out;
}

struct ProjectHandle {
  std::string id;
  std::string manager;
  std::string worker;
  std::string path(std::string_view suffix = {}) const {
    return "/projects/" + id + (suffix.empty() ? "" : "/" + std::string(suffix));
  }
};

inline ProjectHandle create_project(Service& svc, const std::string& csv, const json& schema,
                                    const std::string& pairs = "all",
                                    const std::string& granularity = "character") {
  const auto r = call(svc, "POST", "/projects", svc.config().manager_token,
                      {{"dataset_csv", csv}, {"schema", schema}, {"pair_policy", pairs},
                       {"granularity", granularity}, {"seed", 11}});
  if (r.status != 201) throw std::runtime_error("create failed: " + r.raw);
  return {r.body["project"], r.body["manager_token"], r.body["worker_token"]};
}

inline ProjectHandle dispatched_project(Service& svc, const std::string& csv, const json& schema,
                                        std::int64_t kappa, const std::string& budget,
                                        const std::string& pairs = "all") {
  auto h = create_project(svc, csv, schema, pairs);
  auto r = call(svc, "PUT", h.path("policy"), h.manager, {{"kappa", kappa}, {"budget", budget}});
  if (r.status != 200) throw std::runtime_error("policy failed: " + r.raw);
  r = call(svc, "POST", h.path("dispatch"), h.manager);
  if (r.status != 200) throw std::runtime_error("dispatch failed: " + r.raw);
  return h;
}

inline json table3_schema_json() {
  return table3_schema().to_json();
}

// A random dataset whose sensitive column holds sentinel strings, as CSV.
inline std::string random_csv(std::mt19937_64& rng, std::size_t records, std::size_t attrs,
                              Schema* schema_out) {
  const auto ds = random_dataset(rng, records, attrs);
  const auto& schema = ds.schema();
  std::string csv;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    csv += (j ? "," : "") + schema.attribute(j).name;
  }
  csv += "\n";
  for (const auto& rec : ds.records()) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (j) csv += ",";
      if (schema.attribute(j).role == AttributeRole::kSensitive) {
        csv += "SENTINEL-" + std::to_string(rec.label) + "-zq";
      } else if (rec.values[j]) {
        csv += csv_escape(*rec.values[j]);
      }
    }
    csv += "\n";
  }
  *schema_out = schema;
  return csv;
}

inline bool is_mask_char(char c) {
  return c == '*' || c == '@' || c == '&' || c == '#' || c == '%' || c == '?';
}

// Every true character in a worker-facing display is one the disclosure
// state has revealed, and every revealed character is shown.
inline std::string check_display_against_truth(const json& display, const Dataset& truth,
                                               const DisclosureState& state) {
  const auto cols = truth.schema().non_sensitive();
  const auto& attrs = display.at("attributes");
  if (attrs.size() != cols.size()) return "display shows the wrong attribute count";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (attrs[j] != truth.schema().attribute(cols[j]).name) return "attribute order differs";
  }
  for (const auto& card : display.at("cards")) {
    const int labels[2] = {card["pair"][0].get<int>(), card["pair"][1].get<int>()};
    for (int side = 0; side < 2; ++side) {
      const auto& row = card["rows"][side];
      const std::size_t r = row["row"].get<std::size_t>() - 1;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& cell = row["cells"][j];
        const auto text = cell["text"].get<std::string>();
        const auto& markup = cell["markup"];
        const auto& value = truth.value(labels[side], cols[j]);
        const auto& attr = truth.schema().attribute(cols[j]);
        const auto& revealed = state.revealed({r, j});
        const std::string where = "row " + std::to_string(r + 1) + " " + attr.name;
        if (markup.size() != text.size()) return where + ": markup length differs from text";
        if (!value) {
          if (text != "?") return where + ": missing value not shown as ?";
          continue;
        }
        std::vector<std::size_t> shown;
        if (attr.kind == AttributeKind::kCategory && text.size() == 1 && is_mask_char(text[0]) &&
            !markup[0]["shown"].get<bool>()) {
          // Masked category.
        } else {
          if (text.size() != value->size()) return where + ": rendered length differs";
          for (std::size_t i = 0; i < text.size(); ++i) {
            const bool is_shown = markup[i]["shown"].get<bool>();
            const bool separator = markup[i]["kind"] == "separator";
            if (is_shown) {
              if (text[i] != (*value)[i]) return where + ": shown character is not the true one";
              shown.push_back(i);
            } else if (separator) {
              if (attr.kind != AttributeKind::kDate || text[i] != (*value)[i]) {
                return where + ": bad separator";
              }
            } else if (!is_mask_char(text[i])) {
              return where + ": undisclosed character '" + std::string(1, text[i]) + "' leaked";
            }
          }
        }
        if (shown != revealed) return where + ": shown characters differ from the revealed set";
      }
    }
  }
  return {};
}

struct FuzzReport {
  std::string error;
  std::size_t requests = 0;
  std::size_t reveals_ok = 0;
  std::size_t reveals_denied = 0;
  std::size_t frontier_checks = 0;
  std::size_t display_checks = 0;
  Rational final_k;
  Rational replayed_k;
};

// Random worker traffic against a random project. Checks after every
// response: no sensitive sentinel in the body, K within budget; after
// every display: the trust boundary against the replayed audit state; after
// every frontier-directed reveal: the charged delta equals the offered one.
inline FuzzReport fuzz_worker_api(std::uint64_t seed, std::size_t requests) {
  FuzzReport rep;
  std::mt19937_64 rng(seed);
  Schema schema;
  const auto csv = random_csv(rng, 12, 3, &schema);
  const auto truth = load_dataset(csv, schema);
  const Rational budget(std::uniform_int_distribution<int>(2, 20)(rng), 100);
  const std::int64_t kappa = std::uniform_int_distribution<int>(1, 2)(rng);
  Service svc(ServiceConfig{});
  const auto h = dispatched_project(svc, csv, schema.to_json(), kappa, to_fraction_string(budget));

  const auto attr_names = [&] {
    std::vector<std::string> out;
    for (auto c : schema.non_sensitive()) out.push_back(schema.attribute(c).name);
    out.push_back("S");
    out.push_back("bogus");
    return out;
  }();
  const std::size_t rows = 2 * 66;
  json last_display;

  auto state_now = [&]() {
    const auto events = parse_audit_log(call(svc, "GET", h.path("audit"), h.manager).raw);
    return replay(display_for_log(truth, events), events);
  };
  auto fail = [&](const std::string& why, const Reply& r) {
    rep.error = "request " + std::to_string(rep.requests) + ": " + why + " (" +
                std::to_string(r.status) + " " + r.raw.substr(0, 200) + ")";
  };
  auto common_checks = [&](const Reply& r) {
    if (r.raw.find("SENTINEL") != std::string::npos) return fail("sensitive sentinel leaked", r), false;
    if (r.body.is_object() && r.body.contains("K")) {
      const auto k = parse_rational(r.body["K"]["fraction"].get<std::string>());
      if (k > budget) return fail("K exceeds the budget", r), false;
    }
    if (r.status >= 500) return fail("server error", r), false;
    return true;
  };

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (; rep.requests < requests && rep.error.empty(); ++rep.requests) {
    const double x = u(rng);
    Reply r;
    if (x < 0.2) {
      r = call(svc, "GET", h.path("display"), h.worker);
      if (!common_checks(r)) break;
      if (r.status != 200) {
        fail("display failed", r);
        break;
      }
      last_display = r.body;
      const auto state = state_now();
      const auto err = check_display_against_truth(r.body, truth, state.state);
      if (!err.empty()) {
        fail(err, r);
        break;
      }
      ++rep.display_checks;
    } else if (x < 0.35 && !last_display.is_null()) {
      // Take an offered admissible reveal straight from the last display.
      std::vector<std::pair<std::size_t, const json*>> offers;
      for (const auto& card : last_display["cards"]) {
        for (const auto& row : card["rows"]) {
          for (const auto& cell : row["cells"]) {
            if (!cell["next"].is_null() && cell["next"]["admissible"].get<bool>()) {
              offers.emplace_back(row["row"].get<std::size_t>(), &cell);
            }
          }
        }
      }
      if (offers.empty()) continue;
      const auto [row, offered] = offers[rng() % offers.size()];
      const json cell_copy = *offered;
      const json* cell = &cell_copy;
      last_display = json();
      r = call(svc, "POST", h.path("reveal"), h.worker,
               {{"row", row}, {"attribute", (*cell)["attribute"]}, {"target", (*cell)["next"]["target"]}});
      if (!common_checks(r)) break;
      if (r.status != 200) {
        fail("offered reveal was refused", r);
        break;
      }
      if (r.body["delta"] != (*cell)["next"]["delta"]) {
        fail("charged delta differs from the offered one", r);
        break;
      }
      ++rep.reveals_ok;
      ++rep.frontier_checks;
    } else if (x < 0.8) {
      static const char* targets[] = {nullptr, "partial", "full", "masked", "sideways"};
      json body = {{"row", std::uniform_int_distribution<int>(0, static_cast<int>(rows) + 2)(rng)},
                   {"attribute", attr_names[rng() % attr_names.size()]}};
      if (const char* t = targets[rng() % 5]) body["target"] = t;
      r = call(svc, "POST", h.path("reveal"), h.worker, body);
      if (!common_checks(r)) break;
      if (r.status == 200) {
        last_display = json();
        ++rep.reveals_ok;
      } else if (r.status == 400 || r.status == 404 || r.status == 409 || r.status == 422) {
        ++rep.reveals_denied;
      } else {
        fail("unexpected reveal status", r);
        break;
      }
    } else if (x < 0.9) {
      const int a = std::uniform_int_distribution<int>(0, 13)(rng);
      const int b = std::uniform_int_distribution<int>(0, 13)(rng);
      static const char* verdicts[] = {"match", "nonmatch", "uncertain", "perhaps"};
      const auto v = rng() % 4;
      r = call(svc, "POST", h.path("decisions"), h.worker,
               {{"pair", {a, b}}, {"verdict", verdicts[v]}});
      if (!common_checks(r)) break;
      const bool valid = a >= 1 && b <= 12 && a < b && v < 3;
      if ((r.status == 200) != valid) {
        fail("decision accepted or refused wrongly", r);
        break;
      }
    } else if (x < 0.95) {
      // Wrong credentials and wrong roles.
      const int which = static_cast<int>(rng() % 3);
      static const char* paths[] = {"display", "export", "audit"};
      r = call(svc, "GET", h.path(paths[which]), which == 0 ? "not-a-token" : h.worker);
      if (r.status != (which == 0 ? 401 : 403)) {
        fail("request with the wrong credentials was served", r);
        break;
      }
      if (!common_checks(r)) break;
    } else {
      const auto res = svc.handle("POST", h.path("reveal"), h.worker, "{\"row\": [1,");
      r = {res.status, res.body, json()};
      if (r.status != 400) {
        fail("malformed body not rejected", r);
        break;
      }
      if (!common_checks(r)) break;
    }
  }
  if (!rep.error.empty()) return rep;

  const auto summary = call(svc, "GET", h.path(), h.worker);
  rep.final_k = parse_rational(summary.body["K"]["fraction"].get<std::string>());
  const auto replayed = state_now();
  rep.replayed_k = score_of(replayed.state, replayed.policy);
  if (rep.final_k != rep.replayed_k) rep.error = "replayed K differs from live K";
  if (rep.final_k > budget) rep.error = "final K exceeds the budget";
  return rep;
}

}  // namespace kapr::testing
