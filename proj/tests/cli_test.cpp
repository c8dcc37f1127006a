// Copyright 2026 The qmonty Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "qmonty/equilibrium.hpp"
#include "qmonty/service.hpp"

namespace qmonty::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json RunJson(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "json"});
  const auto r = RunCli(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return nlohmann::json::parse(r.out);
}

TEST(Cli, PayoffAtEquilibrium) {
  const auto r = RunCli({"payoff", "--alpha0", "pi/4", "--alpha1", "pi/4", "--eta", "0.5"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("p_win           0.500000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("gain            0.000000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# payoff alpha0=0.785398163397448"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("eta=0.5"), std::string::npos);
}

TEST(Cli, PayoffSwitchBaseline) {
  const auto r = RunCli({"payoff", "--alpha0", "0", "--alpha1", "0", "--eta", "0"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("0.666667"), std::string::npos) << r.out;
}

TEST(Cli, PayoffJsonAndQuantum) {
  const auto j = RunJson({"payoff", "--alpha0", "pi/4", "--alpha1", "0", "--eta", "1"});
  EXPECT_NEAR(j["p_win"].get<double>(), 1.0 / 6.0, 1e-12);
  EXPECT_EQ(j["method"], "analytic");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_NEAR(j["params"]["alpha0"].get<double>(), kQuarterPi, 1e-15);
  const auto q = RunJson({"payoff", "--alpha0", "pi/4", "--alpha1", "pi/4", "--beta", "pi/3"});
  EXPECT_NEAR(q["p_win"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, PayoffMatchesWhatIfBitForBit) {
  const auto cli = RunJson({"payoff", "--alpha0", "0.3", "--alpha1", "1.1", "--eta", "0.7"});
  const auto svc = SessionService::WhatIf({{"alpha0", "0.3"}, {"alpha1", "1.1"}, {"eta", "0.7"}}).json();
  EXPECT_EQ(cli["p_win"].get<double>(), svc["p_win"].get<double>());
  EXPECT_EQ(cli["gain"].get<double>(), svc["gain"].get<double>());
}

TEST(Cli, PayoffCsvUsesSweepSchema) {
  const auto r = RunCli({"--format", "csv", "--no-banner", "payoff", "--alpha0", "0", "--alpha1", "0", "--eta", "1"});
  EXPECT_EQ(r.code, kExitOk);
  std::istringstream in(r.out);
  std::string header, cols, row;
  std::getline(in, header);
  std::getline(in, cols);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("# payoff", 0), 0u);
  EXPECT_EQ(cols, "alpha0,alpha1,eta,beta,p_win,gain");
  EXPECT_EQ(row.rfind("0,0,1,,0.333333333333333", 0), 0u) << row;
}

TEST(Cli, PayoffUsageErrors) {
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "0"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "0", "--alpha1", "0"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "pi", "--alpha1", "0", "--eta", "0.5"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "0", "--alpha1", "0", "--eta", "2"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "0", "--alpha1", "0", "--eta", "0.5", "--beta", "1"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"payoff", "--alpha0", "quarter", "--alpha1", "0", "--eta", "0.5"}).code, kExitUsage);
  EXPECT_EQ(RunCli({}).code, kExitUsage);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"--format", "yaml", "payoff"}).code, kExitUsage);
}

TEST(Cli, Help) {
  const auto r = RunCli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("scan-pure"), std::string::npos);
}

TEST(Cli, NStageBruteForce) {
  const auto r = RunCli({"nstage", "--n", "5", "--brute-force"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("4/5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("stick,stick,switch"), std::string::npos);
  const auto j = RunJson({"nstage", "--n", "6", "--brute-force", "--tie-break", "adversarial"});
  EXPECT_EQ(j["exact_value"], "5/6");
  EXPECT_EQ(j["params"]["tie_break"], "adversarial");
}

TEST(Cli, NStageQuantumAndDefaults) {
  const auto q = RunJson({"nstage", "--n", "10", "--quantum"});
  EXPECT_TRUE(q["is_nash"].get<bool>());
  EXPECT_NEAR(q["quantum_value"].get<double>(), 0.5, 1e-12);
  EXPECT_FALSE(q.contains("exact_value"));
  const auto both = RunJson({"nstage", "--n", "4"});
  EXPECT_EQ(both["exact_value"], "3/4");
  EXPECT_TRUE(both["is_nash"].get<bool>());
  EXPECT_EQ(RunCli({"nstage", "--n", "9", "--brute-force"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"nstage", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"nstage", "--n", "4", "--tie-break", "sneaky"}).code, kExitUsage);
}

TEST(Cli, NashExpectations) {
  const auto ok = RunCli({"nash", "--expect-nash"});
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_NE(ok.out.find("is_nash         true"), std::string::npos) << ok.out;
  const auto bad = RunCli({"nash", "--alpha0", "0", "--alpha1", "0", "--eta", "1", "--expect-nash"});
  EXPECT_EQ(bad.code, kExitCheckFailed);
  EXPECT_EQ(RunCli({"nash", "--alpha0", "0", "--alpha1", "0", "--eta", "1"}).code, kExitOk);
  const auto j = RunJson({"nash", "--alpha0", "0", "--alpha1", "0", "--eta", "1"});
  EXPECT_NEAR(j["exploitability"].get<double>(), 1.0 / 3.0, 1e-12);
}

TEST(Cli, ScanPureExitCodeFollowsCertificate) {
  const auto cert = no_pure_equilibrium_scan(kPi / 100.0, 0.2);
  const auto r = RunCli({"--format", "json", "scan-pure", "--step", "pi/100"});
  EXPECT_EQ(r.code, cert.passed ? kExitOk : kExitCheckFailed);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["min_exploit"].get<double>(), cert.min_exploitability);
  EXPECT_EQ(j["violations"].get<long long>(), cert.violations);
  EXPECT_EQ(RunCli({"scan-pure", "--step", "pi/100", "--threshold", "0.1"}).code, kExitOk);
  EXPECT_EQ(RunCli({"scan-pure", "--step", "pi/10"}).code, kExitUsage);
}

TEST(Cli, SweepCsvToStdoutAndFile) {
  const auto r = RunCli({"--format", "csv", "sweep", "--grid", "3x3x2"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("alpha0,alpha1,eta,beta,p_win,gain\n"), std::string::npos);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 2 + 1 + 18);  // banner, params, header, rows

  const std::string path = ::testing::TempDir() + "qmonty_sweep.csv";
  const auto f = RunCli({"sweep", "--grid", "2x2x2", "--quantum-bob", "--out", path});
  EXPECT_EQ(f.code, kExitOk) << f.err;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "alpha0,alpha1,eta,beta,p_win,gain");
  std::remove(path.c_str());
  EXPECT_EQ(RunCli({"sweep", "--grid", "3x3"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"sweep", "--out", "/nonexistent-dir/x.csv", "--grid", "2x2x2"}).code, kExitUsage);
}

TEST(Cli, SweepJson) {
  const auto j = RunJson({"sweep", "--grid", "2x2x3"});
  EXPECT_EQ(j["rows"].size(), 12u);
  EXPECT_EQ(j["params"]["grid"], "2x2x3");
}

TEST(Cli, McIsReproducible) {
  const std::vector<std::string> args = {"--no-banner", "mc", "--trials", "20000", "--seed", "17", "--profile",
                                         "pi/4,0,1"};
  const auto a = RunCli(args);
  const auto b = RunCli(args);
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("seed=17"), std::string::npos);
  EXPECT_NE(a.out.find("pass            true"), std::string::npos) << a.out;
}

TEST(Cli, McSeedFromEnvironment) {
  ::setenv("QMONTY_SEED", "4242", 1);
  const auto j = RunJson({"mc", "--trials", "1000"});
  ::unsetenv("QMONTY_SEED");
  EXPECT_EQ(j["params"]["seed"].get<std::uint64_t>(), 4242u);
  const auto d = RunJson({"mc", "--trials", "1000"});
  EXPECT_EQ(d["params"]["seed"].get<std::uint64_t>(), kDefaultSeed);
  ::setenv("QMONTY_SEED", "not-a-number", 1);
  EXPECT_EQ(RunCli({"mc", "--trials", "10"}).code, kExitUsage);
  ::unsetenv("QMONTY_SEED");
}

TEST(Cli, McNStagePolicy) {
  const auto j = RunJson({"mc", "--trials", "50000", "--n", "5", "--policy", "stick,stick,switch"});
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_NEAR(j["p_exact"].get<double>(), 0.8, 1e-12);
  EXPECT_EQ(RunCli({"mc", "--n", "5", "--policy", "stick,switch"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"mc", "--n", "5", "--policy", "stick,hop,switch"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"mc", "--profile", "1,2"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"mc", "--trials", "0"}).code, kExitUsage);
}

}  // namespace
}  // namespace qmonty::cli
