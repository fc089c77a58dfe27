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

// kaprctl: operator tooling over the kaprlink C API.
//
//   kaprctl validate --dataset d.csv --schema s.json
//   kaprctl score    --dataset d.csv --schema s.json --state st.txt [--kappa K] [--budget B]
//   kaprctl replay   --dataset d.csv --schema s.json --audit audit.log
//   kaprctl serve    [--config c.json] [--port P] [--storage DIR]
//
// Exit status: 0 ok, 1 invalid input, 2 policy violation.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kapr/kapr.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPolicy = 2;

int exit_code_for(int status) {
  switch (status) {
    case KAPR_OK: return kExitOk;
    case KAPR_ERR_POLICY_VIOLATION:
    case KAPR_ERR_BUDGET:
    case KAPR_ERR_KAPPA: return kExitPolicy;
    default: return kExitInvalid;
  }
}

int report_failure(int status) {
  std::cerr << "kaprctl: " << kapr_status_name(status) << ": " << kapr_last_error() << "\n";
  return exit_code_for(status);
}

// Takes ownership of a string returned by the library.
json take_json(char* text) {
  std::unique_ptr<char, decltype(&kapr_string_free)> guard(text, kapr_string_free);
  return json::parse(text);
}

std::string fraction(const json& r) {
  return r.at("fraction").get<std::string>() + " (" + r.at("decimal").get<std::string>() + ")";
}

struct DisplayHandle {
  kapr_display* p = nullptr;
  ~DisplayHandle() { kapr_display_free(p); }
};

struct StateHandle {
  kapr_state* p = nullptr;
  ~StateHandle() { kapr_state_free(p); }
};

struct Common {
  std::string dataset;
  std::string schema;
  std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--dataset", c.dataset, "CSV dataset")->required()->check(CLI::ExistingFile);
  cmd->add_option("--schema", c.schema, "JSON schema")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
}

int cmd_validate(const Common& c) {
  char* out = nullptr;
  const int st = kapr_validate(c.dataset.c_str(), c.schema.c_str(), &out);
  if (st != KAPR_OK) return report_failure(st);
  const auto report = take_json(out);
  if (c.format == "json") {
    std::cout << report.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "N=" << report["N"].get<std::size_t>() << ", D=" << report["D"].get<std::size_t>()
            << "\n";
  for (const auto& a : report["attributes"]) {
    std::cout << "  " << a["name"].get<std::string>() << ": " << a["kind"].get<std::string>()
              << ", " << a["role"].get<std::string>();
    if (a.contains("layout")) std::cout << " (" << a["layout"].get<std::string>() << ")";
    std::cout << "\n";
  }
  return kExitOk;
}

struct ScoreArgs {
  std::string state;
  std::int64_t kappa = 1;
  std::optional<std::string> budget;
  std::string pairs = "all";
  std::string granularity = "character";
  bool cells = false;
};

int cmd_score(const Common& c, const ScoreArgs& a) {
  DisplayHandle display;
  int st = kapr_display_open(c.dataset.c_str(), c.schema.c_str(), a.pairs.c_str(),
                             a.granularity.c_str(), &display.p);
  if (st != KAPR_OK) return report_failure(st);
  StateHandle state;
  st = kapr_state_load(display.p, a.state.c_str(), &state.p);
  if (st != KAPR_OK) return report_failure(st);
  const char* budget = a.budget ? a.budget->c_str() : nullptr;
  char* out = nullptr;
  st = kapr_state_score(state.p, a.kappa, budget, &out);
  if (st != KAPR_OK) return report_failure(st);
  auto score = take_json(out);
  json cells;
  if (a.cells || c.format == "json") {
    st = kapr_state_cells(state.p, &out);
    if (st != KAPR_OK) return report_failure(st);
    cells = take_json(out);
  }

  if (c.format == "json") {
    score["cells"] = std::move(cells);
    std::cout << score.dump(2) << "\n";
  } else {
    std::cout << "K = " << fraction(score["K"]) << "\n";
    std::cout << "N_rows = " << score["n_rows"].get<std::size_t>()
              << ", D = " << score["D"].get<std::size_t>()
              << ", kappa = " << score["kappa"].get<std::int64_t>() << "\n";
    std::cout << "row  k  K_i\n";
    for (std::size_t i = 0; i < score["rows"].size(); ++i) {
      std::cout << i + 1 << "  " << score["k"][i].get<std::size_t>() << "  "
                << score["rows"][i]["fraction"].get<std::string>() << "\n";
    }
    if (score.contains("pinned")) {
      const auto& p = score["pinned"];
      std::cout << "with pinned anonymity set sizes: K = " << fraction(p["K"]) << "\n";
      for (const auto& d : p["differences"]) {
        std::cout << "  row " << d["row"].get<std::size_t>() << ": pinned k = "
                  << d["pinned"].get<std::int64_t>() << ", computed k = "
                  << d["computed"].get<std::size_t>() << "\n";
      }
    }
    if (a.cells) {
      for (const auto& row : cells) {
        std::cout << row["row"].get<std::size_t>() << "  ";
        for (const auto& cell : row["cells"]) std::cout << cell["text"].get<std::string>() << "  ";
        std::cout << "\n";
      }
    }
  }
  if (score.contains("over_budget") && score["over_budget"].get<bool>()) {
    std::cerr << "kaprctl: budget: score exceeds the budget\n";
    return kExitPolicy;
  }
  return kExitOk;
}

int cmd_replay(const Common& c, const std::string& audit) {
  char* out = nullptr;
  const int st = kapr_replay(c.dataset.c_str(), c.schema.c_str(), audit.c_str(), &out);
  if (st != KAPR_OK) return report_failure(st);
  const auto r = take_json(out);
  if (c.format == "json") {
    std::cout << r.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "event  delta  K\n";
  for (const auto& s : r["steps"]) {
    std::cout << s["seq"].get<std::int64_t>() << "  " << s["delta"]["fraction"].get<std::string>()
              << "  " << s["K"]["fraction"].get<std::string>() << "\n";
  }
  std::cout << "events = " << r["events"].get<std::size_t>()
            << ", denied = " << r["denied"].get<std::size_t>()
            << ", decisions = " << r["decisions"].get<std::size_t>() << "\n";
  std::cout << "K = " << fraction(r["K"]) << "\n";
  return kExitOk;
}

struct ServeArgs {
  std::string config;
  std::optional<int> port;
  std::optional<std::string> storage;
  std::optional<std::string> host;
};

int cmd_serve(const ServeArgs& a) {
  char* out = nullptr;
  int st = kapr_config_load(a.config.empty() ? nullptr : a.config.c_str(), &out);
  if (st != KAPR_OK) return report_failure(st);
  auto config = take_json(out);
  if (a.port) config["port"] = *a.port;
  if (a.storage) config["storage"] = *a.storage;
  if (a.host) config["host"] = *a.host;

  // Block termination signals in every thread; the main thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  kapr_server* server = nullptr;
  st = kapr_server_start(config.dump().c_str(), &server);
  if (st != KAPR_OK) return report_failure(st);
  char* token = nullptr;
  kapr_server_manager_token(server, &token);
  std::cout << "listening on " << config.value("host", "127.0.0.1") << ":"
            << kapr_server_port(server) << "\n";
  if (!config.contains("manager_token")) std::cout << "manager token: " << token << "\n";
  std::cout.flush();
  kapr_string_free(token);

  int sig = 0;
  sigwait(&signals, &sig);
  kapr_server_stop(server);
  kapr_server_free(server);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kaprctl: privacy-budgeted record linkage tooling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kapr_version()));

  Common common;
  auto* validate = app.add_subcommand("validate", "Load a dataset against its schema");
  add_common(validate, common);

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a disclosure state file");
  add_common(score, common);
  score->add_option("--state", score_args.state, "Disclosure state file")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--kappa", score_args.kappa, "Minimum anonymity set size")
      ->check(CLI::PositiveNumber);
  score->add_option("--budget", score_args.budget, "Privacy budget (decimal or p/q)");
  score->add_option("--pairs", score_args.pairs, "Pair policy: all or threshold:<tau>");
  score->add_option("--granularity", score_args.granularity, "Date granularity")
      ->check(CLI::IsMember({"character", "element"}));
  score->add_flag("--cells", score_args.cells, "Print the rendered cells");

  std::string audit;
  auto* replay = app.add_subcommand("replay", "Recompute the score trajectory of an audit log");
  add_common(replay, common);
  replay->add_option("--audit", audit, "Audit log (JSON lines)")->required()->check(CLI::ExistingFile);

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the project HTTP service");
  serve->add_option("--config", serve_args.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  serve->add_option("--port", serve_args.port, "Port (0 picks a free one)");
  serve->add_option("--storage", serve_args.storage, "Storage directory");
  serve->add_option("--host", serve_args.host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*score) return cmd_score(common, score_args);
    if (*replay) return cmd_replay(common, audit);
    if (*serve) return cmd_serve(serve_args);
  } catch (const json::exception& e) {
    std::cerr << "kaprctl: malformed library output: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
