// Copyright 2026 The osinv Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using osinv::cli::Json;

struct Output {
  int code = 0;
  std::string out;
  std::string err;
};

std::string data(const std::string& name) { return std::string(OSINV_TEST_DATA) + "/" + name; }
std::string golden(const std::string& name) {
  return std::string(OSINV_TEST_GOLDEN) + "/" + name + ".json";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Output run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Output o;
  o.code = osinv::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

struct Case {
  std::string name;
  std::vector<std::string> args;  // file arguments are names under the data directory
  int code;
};

void PrintTo(const Case& c, std::ostream* os) { *os << c.name; }

std::vector<std::string> resolve(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) out.push_back(a.ends_with(".json") ? data(a) : a);
  return out;
}

const std::vector<Case>& cases() {
  static const std::vector<Case> all{
      {"spectrum_u5", {"spectrum", "U5.json"}, 0},
      {"canon_u5", {"canon", "U5.json"}, 0},
      {"cois_moved", {"unitary-cois", "U5.json", "U5_moved.json"}, 0},
      {"cois_other", {"unitary-cois", "U5.json", "U5_other.json", "--oracle"}, 0},
      {"cois_four_point", {"unitary-cois", "U4.json", "V4.json"}, 3},
      {"cois_four_point_oracle", {"unitary-cois", "U4.json", "V4.json", "--oracle"}, 0},
      {"deg1_d5_e5", {"deg1", "D5.json", "E5.json"}, 0},
      {"deg1_d5_g5", {"deg1", "D5.json", "G5.json"}, 0},
      {"norm_x3_a2", {"norm", "X3.json", "--element", "A2.json", "--level", "2"}, 0},
      {"osdist_x3_y3", {"osdist", "X3.json", "Y3.json", "--levels", "1", "--restarts", "2"}, 0},
      {"wt_3x3", {"family", "wt", "--variant", "3x3", "--t", "0.3", "--s", "0.7"}, 0},
      {"wt_3x3_equal", {"family", "wt", "--variant", "3x3", "--t", "0.4", "--s", "0.4"}, 0},
      {"wt_2x2",
       {"family", "wt", "--variant", "2x2", "--t", "0.3", "--s", "0.7", "--restarts", "16"}, 0},
      {"gh_m3_n3", {"gh-dist", "M3.json", "N3.json", "--kmax", "2"}, 0},
      {"gh_m3_relabeled", {"gh-dist", "M3.json", "M3_relabeled.json", "--kmax", "2"}, 0},
      {"theory_two_d1", {"gh-theory", "two_d1.json", "--depth", "3"}, 0},
      {"theory_m3", {"gh-theory", "M3.json", "--depth", "2"}, 0},
  };
  return all;
}

class Golden : public ::testing::TestWithParam<Case> {};

TEST_P(Golden, ReproducesStoredReport) {
  const auto& c = GetParam();
  const auto o = run(resolve(c.args));
  EXPECT_EQ(o.code, c.code);
  EXPECT_EQ(o.out, slurp(golden(c.name)));
}

TEST_P(Golden, StoredReportVerifies) {
  const auto o = run({"verify", golden(GetParam().name)});
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(Json::parse(o.out).at("ok").get<bool>());
}

TEST_P(Golden, SameBytesWithFourJobs) {
  auto args = resolve(GetParam().args);
  args.insert(args.begin(), {"--jobs", "4"});
  EXPECT_EQ(run(args).out, slurp(golden(GetParam().name)));
}

INSTANTIATE_TEST_SUITE_P(Cli, Golden, ::testing::ValuesIn(cases()),
                         [](const auto& info) { return info.param.name; });

TEST(Cli, WtThreeByThreeOffDiagonal) {
  const auto o = run({"family", "wt", "--variant", "3x3", "--t", "0.3", "--s", "0.7"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(Json::parse(o.out)["result"]["verdict"], "NotIsomorphic");
}

TEST(Cli, FourPointPairWithoutOracleIsUnknown) {
  const auto o = run({"unitary-cois", data("U4.json"), data("V4.json")});
  EXPECT_EQ(o.code, 3);
  EXPECT_EQ(Json::parse(o.out)["result"]["verdict"], "Unknown");
}

TEST(Cli, FourPointPairWithOracle) {
  const auto o = run({"unitary-cois", data("U4.json"), data("V4.json"), "--oracle"});
  EXPECT_EQ(o.code, 0);
  const auto res = Json::parse(o.out)["result"];
  EXPECT_EQ(res["verdict"], "NotIsomorphic");
  EXPECT_EQ(res["exhaustion"]["failures"].size(), 24u);
  ASSERT_EQ(res["four_point"]["determinants"].size(), 24u);
  for (const auto& d : res["four_point"]["determinants"])
    EXPECT_GT(std::hypot(d[0].get<double>(), d[1].get<double>()), 0.1);
}

TEST(Cli, OsdistDeterministicAcrossRunsAndJobs) {
  const std::vector<std::string> args{"osdist", data("X3.json"), data("Y3.json"), "--levels", "2",
                                      "--restarts", "4", "--seed", "7"};
  const auto first = run(args);
  ASSERT_EQ(first.code, 0) << first.out;
  EXPECT_EQ(run(args).out, first.out);
  auto parallel = args;
  parallel.insert(parallel.begin(), {"-j", "4"});
  EXPECT_EQ(run(parallel).out, first.out);
  const auto res = Json::parse(first.out)["result"];
  EXPECT_EQ(res["seed"], 7);
  EXPECT_EQ(res["restarts"], 4);
}

TEST(Cli, TimingOnlyOnRequest) {
  const std::vector<std::string> args{"canon", data("U5.json")};
  EXPECT_FALSE(Json::parse(run(args).out).contains("wall_time_s"));
  auto timed = args;
  timed.insert(timed.begin(), "--timing");
  EXPECT_TRUE(Json::parse(run(timed).out).contains("wall_time_s"));
}

TEST(Cli, InvalidInputsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"spectrum", data("not_unitary.json")},
           {"gh-dist", data("bad_structure.json"), data("M3.json")},
           {"canon", data("no_such_file.json")},
           {"family", "wt", "--variant", "4x4", "--t", "0.3", "--s", "0.3"},
           {"family", "wt", "--t", "1.5", "--s", "0.3"},
           {"no-such-command"},
           {}}) {
    const auto o = run(args);
    EXPECT_EQ(o.code, 2) << o.out;
    const auto j = Json::parse(o.out);
    EXPECT_TRUE(j.contains("error"));
    EXPECT_EQ(j["exit_code"], 2);
  }
}

TEST(Cli, CapacityExitsFour) {
  const auto o = run({"gh-dist", data("M3.json"), data("N3.json"), "--kmax", "2", "--cap", "2"});
  EXPECT_EQ(o.code, 4);
  const auto j = Json::parse(o.out);
  EXPECT_EQ(j["error"]["kind"], "capacity");
  EXPECT_EQ(j["error"]["cap"], 2);
}

TEST(Cli, TamperedReportFailsVerification) {
  auto report = Json::parse(slurp(golden("gh_m3_n3")));
  report["result"]["value"] = 0.5;
  const auto path = fs::temp_directory_path() / "osinv_tampered_report.json";
  std::ofstream(path) << report.dump();
  const auto o = run({"verify", path.string()});
  fs::remove(path);
  EXPECT_EQ(o.code, 2);
  EXPECT_FALSE(Json::parse(o.out).at("ok").get<bool>());
}

TEST(Cli, TamperedCertificateFailsVerification) {
  auto report = Json::parse(slurp(golden("cois_moved")));
  report["result"]["motion"]["rotation"] = report["result"]["motion"]["rotation"].get<double>() + 0.1;
  const auto path = fs::temp_directory_path() / "osinv_tampered_certificate.json";
  std::ofstream(path) << report.dump();
  const auto o = run({"verify", path.string()});
  fs::remove(path);
  EXPECT_EQ(o.code, 2);
  int failed = 0;
  const auto verdict = Json::parse(o.out);
  for (const auto& c : verdict.at("checks")) failed += !c.at("ok").get<bool>();
  EXPECT_GE(failed, 2) << o.out;
}

}  // namespace
