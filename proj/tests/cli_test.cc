// Copyright 2026 The mrd Authors
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

#include "mrd/cli.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "mrd/game_io.h"

namespace mrd {
namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun RunMrd(std::vector<std::string> args) {
  args.insert(args.begin(), "mrd");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string WriteTemp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "/" + name;
  FILE* f = std::fopen(path.c_str(), "w");
  std::fputs(text.c_str(), f);
  std::fclose(f);
  return path;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

const char kCoordination[] = "2\n1 0.2\n0.2 1\n";

TEST(CliTest, VerifyExitCodes) {
  const std::string game = WriteTemp("cli_coord.txt", kCoordination);
  const std::string z = WriteTemp("cli_z.txt", "0.9 0.1\n");
  const CliRun rejected = RunMrd({"verify", "--game", game, "--strategy", z});
  EXPECT_EQ(rejected.code, kExitRejected);
  const nlohmann::json j = nlohmann::json::parse(rejected.out);
  EXPECT_NEAR(j["gap"].get<double>(), 0.064, 1e-15);
  EXPECT_FALSE(j["verified"].get<bool>());
  EXPECT_EQ(RunMrd({"verify", "--game", game, "--x0", z, "--eps", "0.07"}).code,
            kExitOk);
  EXPECT_EQ(RunMrd({"verify", "--game", game, "--x0", z, "--eps", "-1"}).code,
            kExitInvalidInput);
  const std::string bad = WriteTemp("cli_bad.txt", "0.9 0.2\n");
  EXPECT_EQ(RunMrd({"verify", "--game", game, "--x0", bad}).code,
            kExitInvalidInput);
  EXPECT_EQ(RunMrd({"verify", "--game", game}).code, kExitInvalidInput);
  const std::string mixed = WriteTemp("cli_mixed.txt", "0.5 0.5\n");
  EXPECT_EQ(RunMrd({"verify", "--game", game, "--x0", mixed, "--eps", "1e-9"})
                .code,
            kExitOk);
}

TEST(CliTest, OracleListsCertificates) {
  const std::string game = WriteTemp("cli_coord.txt", kCoordination);
  const CliRun r = RunMrd({"oracle", "--game", game});
  ASSERT_EQ(r.code, kExitOk);
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  for (const std::string& line : lines) {
    const nlohmann::json j = nlohmann::json::parse(line);
    EXPECT_LE(j["gap"].get<double>(), 1e-9);
    EXPECT_EQ(j["z"].size(), 2u);
  }
}

TEST(CliTest, SolveSingleStrategy) {
  const std::string game = WriteTemp("cli_one.txt", "1\n0.5\n");
  const CliRun r = RunMrd({"solve", "--game", game});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["steps"].get<int>(), 1);
}

TEST(CliTest, SolveCoordinationWithTrace) {
  const std::string game = WriteTemp("cli_coord.txt", kCoordination);
  const std::string x0 = WriteTemp("cli_x0.txt", "0.6 0.4\n");
  const std::string trace = ::testing::TempDir() + "/cli_trace.jsonl";
  const CliRun r = RunMrd({"solve", "--game", game, "--x0", x0, "--trace", trace,
                        "--tol", "1e-4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["final_gap"].get<double>(), 1e-4);
  std::ifstream in(trace);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, j["steps"].get<int>() + 1);
  std::remove(trace.c_str());
}

TEST(CliTest, SolveRejectsBadInput) {
  const std::string singular = WriteTemp("cli_sing.txt", "2\n0.5 0.5\n0.5 0.5\n");
  const CliRun r = RunMrd({"solve", "--game", singular});
  EXPECT_EQ(r.code, kExitInvalidInput);
  EXPECT_NE(r.err.find("not invertible"), std::string::npos);
  const std::string game = WriteTemp("cli_coord.txt", kCoordination);
  EXPECT_EQ(RunMrd({"solve", "--game", game, "--tol", "0"}).code,
            kExitInvalidInput);
  EXPECT_EQ(RunMrd({"solve", "--game", game, "--method", "leapfrog"}).code,
            kExitInvalidInput);
  EXPECT_EQ(RunMrd({"solve", "--game", game, "--kkt-tol", "-1"}).code,
            kExitInvalidInput);
  EXPECT_EQ(RunMrd({"solve", "--game", "/nonexistent/game.txt"}).code,
            kExitInvalidInput);
  EXPECT_EQ(RunMrd({}).code, kExitInvalidInput);
}

TEST(CliTest, SolveReportsNonConvergence) {
  const std::string game = WriteTemp("cli_coord.txt", kCoordination);
  const std::string x0 = WriteTemp("cli_x0.txt", "0.6 0.4\n");
  const CliRun r =
      RunMrd({"solve", "--game", game, "--x0", x0, "--tmax", "0.1"});
  EXPECT_EQ(r.code, kExitNotConverged);
}

TEST(CliTest, GenRoundTrip) {
  const CliRun r = RunMrd({"gen", "--n", "4", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk);
  const Game g = ParseGame(r.out);
  EXPECT_EQ(g.n(), 4);
  EXPECT_EQ(FormatGame(g), r.out);
  GenSpec spec;
  spec.n = 4;
  spec.seed = 7;
  EXPECT_EQ(g.C(), Generate(spec).C());
  const std::string path = ::testing::TempDir() + "/cli_gen.txt";
  ASSERT_EQ(RunMrd({"gen", "--n", "4", "--seed", "7", "--out", path}).code,
            kExitOk);
  EXPECT_EQ(ReadGame(path).C(), g.C());
  std::remove(path.c_str());
  EXPECT_EQ(RunMrd({"gen", "--n", "0"}).code, kExitInvalidInput);
  EXPECT_EQ(RunMrd({"gen", "--n", "3", "--dist", "normal"}).code,
            kExitInvalidInput);
}

TEST(CliTest, BenchCsv) {
  const CliRun r = RunMrd({"bench", "--n", "3", "--count", "10", "--seed", "1",
                        "--tol", "1e-3", "--tmax", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], kBenchHeader);
  for (size_t k = 1; k < lines.size(); ++k) {
    std::istringstream row(lines[k]);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    ASSERT_EQ(fields.size(), 9u) << lines[k];
    EXPECT_EQ(fields[0], std::to_string(k));
    EXPECT_EQ(fields[1], "3");
  }
}

TEST(CliTest, BenchIsDeterministicWithoutWallclock) {
  const std::vector<std::string> args = {"bench", "--n", "2", "--count", "3",
                                         "--seed", "5", "--tol", "1e-3",
                                         "--tmax", "100", "--omit-wallclock"};
  const CliRun a = RunMrd(args);
  const CliRun b = RunMrd(args);
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
}

}  // namespace
}  // namespace mrd
