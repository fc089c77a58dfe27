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

// Runs the kaprctl binary as a subprocess and checks its output and exit codes.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "service_harness.hpp"

namespace kapr {
namespace {

using nlohmann::json;
using testing::call;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KAPRCTL) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(KAPR_TEST_DATA_DIR) + "/" + name; }

std::string table3_args() {
  return "--dataset " + data("table3.csv") + " --schema " + data("table3_schema.json");
}

std::string score(const char* state, const std::string& extra = "") {
  return "score " + table3_args() + " --state " + data(state) + " " + extra;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() / ("kaprctl_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

TEST(KaprctlTest, ValidatePrintsShape) {
  const auto r = run("validate " + table3_args());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("N=4, D=3"), std::string::npos) << r.out;
}

TEST(KaprctlTest, ValidateRejectsMalformedInput) {
  auto r = run("validate --dataset " + data("bad_date.csv") + " --schema " + data("table3_schema.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("DOB"), std::string::npos) << r.out;
  r = run("validate --dataset " + data("empty.csv") + " --schema " + data("table3_schema.json"));
  EXPECT_EQ(r.code, 1);
  r = run("validate --dataset " + data("header_only.csv") + " --schema " + data("table3_schema.json"));
  EXPECT_EQ(r.code, 1);
  r = run("validate");
  EXPECT_EQ(r.code, 1);
}

TEST(KaprctlTest, ScoresTheWorkedExamples) {
  auto r = run(score("table4_state.txt"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("K = 0 (0)"), std::string::npos) << r.out;

  r = run(score("table6_state.txt"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("K = 3/4 (0.75)"), std::string::npos) << r.out;

  r = run(score("table5_state.txt"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("K = 7/108"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("pinned anonymity set sizes: K = 31/432"), std::string::npos) << r.out;
}

TEST(KaprctlTest, JsonOutputParses) {
  const auto r = run(score("table6_state.txt", "--format json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["K"]["fraction"], "3/4");
  EXPECT_EQ(j["k"], json::array({1, 1, 1, 2, 1, 2, 1, 2, 1, 2, 2, 2}));
}

TEST(KaprctlTest, PolicyViolationsExitWithTwo) {
  EXPECT_EQ(run(score("table6_state.txt", "--kappa 2")).code, 2);
  EXPECT_EQ(run(score("table6_state.txt", "--budget 0.5")).code, 2);
  EXPECT_EQ(run(score("table6_state.txt", "--budget 3/4")).code, 0);
  EXPECT_EQ(run(score("table6_state.txt", "--budget 2")).code, 1);
}

TEST(KaprctlTest, CellsFlagRendersDates) {
  const auto r = run(score("table5_state.txt", "--cells"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("*8/*9/****"), std::string::npos) << r.out;
  EXPECT_EQ(run(score("table5_state.txt", "--cells --granularity element")).code, 0);
}

TEST(KaprctlTest, ReplayOfAnEmptyLogIsZero) {
  TempDir dir("empty");
  const auto log = dir.write("audit.log", "");
  const auto r = run("replay " + table3_args() + " --audit " + log);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("K = 0 (0)"), std::string::npos) << r.out;
}

TEST(KaprctlTest, ReplayReproducesALiveSession) {
  std::mt19937_64 rng(77);
  Schema schema;
  const auto csv = testing::random_csv(rng, 20, 3, &schema);
  Service svc(ServiceConfig{});
  const auto h = testing::dispatched_project(svc, csv, schema.to_json(), 1, "1/5");
  std::vector<std::string> attrs;
  for (auto c : schema.non_sensitive()) attrs.push_back(schema.attribute(c).name);
  const std::size_t rows = 2 * 190;
  for (int i = 0; i < 100; ++i) {
    call(svc, "POST", h.path("reveal"), h.worker,
         {{"row", 1 + rng() % rows}, {"attribute", attrs[rng() % attrs.size()]}});
  }
  const auto live = call(svc, "GET", h.path(), h.worker).body["K"]["fraction"].get<std::string>();
  const auto audit = call(svc, "GET", h.path("audit"), h.manager).raw;

  TempDir dir("replay");
  const auto args = "replay --dataset " + dir.write("d.csv", csv) + " --schema " +
                    dir.write("s.json", schema.to_json().dump()) + " --format json --audit ";
  auto r = run(args + dir.write("audit.log", audit));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["K"]["fraction"], live);
  EXPECT_EQ(j["events"].get<std::size_t>(), parse_audit_log(audit).size());
  EXPECT_GT(j["steps"].size(), 0u);

  // A log whose recorded K was altered no longer replays.
  auto events = parse_audit_log(audit);
  for (auto& e : events) {
    if (e.action == AuditAction::kReveal && e.ok) {
      e.total += Rational(1, 1000);
      break;
    }
  }
  r = run(args + dir.write("tampered.log", to_jsonl(events)));
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("replay gives"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace kapr
