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

#include "mrd/game_io.h"

#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "mrd/rng.h"
#include "test_util.h"

namespace mrd {
namespace {

// Runs `fn`, which must throw ParseError, and returns the error.
template <typename Fn>
ParseError CatchParse(Fn fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError("none", 0, 0);
}

TEST(GameIoTest, ParsesExample) {
  const Game g = ParseGame("2\n1 0.2\n0.2 1\n");
  EXPECT_EQ(g.n(), 2);
  EXPECT_EQ(g.C()(0, 1), 0.2);
  EXPECT_EQ(g.C()(1, 1), 1.0);
  // Tabs, CRLF and trailing blank lines are accepted.
  const Game h = ParseGame("2\r\n1\t0.2\r\n 0.2  1\r\n\n\n");
  EXPECT_EQ(h.C(), g.C());
}

TEST(GameIoTest, RoundTripIsExact) {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Game g = Game::FromMatrix(testing::RandomPayoffs(n, rng));
    EXPECT_EQ(ParseGame(FormatGame(g)).C(), g.C());
  }
}

TEST(GameIoTest, FileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/mrd_game.txt";
  const Game g = ParseGame("3\n0.5 1 0.1\n0.1 0.5 1\n1 0.1 0.5\n");
  WriteGame(g, path);
  EXPECT_EQ(ReadGame(path).C(), g.C());
  std::remove(path.c_str());
  EXPECT_THROW(ReadGame(path), ValidationError);
}

TEST(GameIoTest, RejectsOutOfRangeEntries) {
  const ParseError zero = CatchParse([] { ParseGame("2\n1 0\n0.2 1\n"); });
  EXPECT_EQ(zero.line(), 2);
  EXPECT_EQ(zero.column(), 3);
  EXPECT_THROW(ParseGame("2\n1 0.2\n0.2 1.5\n"), ParseError);
  EXPECT_THROW(ParseGame("2\n1 -0.2\n0.2 1\n"), ParseError);
  EXPECT_THROW(ParseGame("2\n1 nan\n0.2 1\n"), ParseError);
}

TEST(GameIoTest, ReportsShapeErrorsWithPosition) {
  const ParseError rows = CatchParse([] { ParseGame("3\n1 1 1\n1 1 1\n"); });
  EXPECT_EQ(rows.line(), 4);
  const ParseError wide = CatchParse([] { ParseGame("2\n1 1 1\n1 1\n"); });
  EXPECT_EQ(wide.line(), 2);
  EXPECT_EQ(wide.column(), 5);
  const ParseError header = CatchParse([] { ParseGame("2 2\n1 1\n1 1\n"); });
  EXPECT_EQ(header.line(), 1);
  EXPECT_EQ(header.column(), 3);
  const ParseError dim = CatchParse([] { ParseGame("x\n"); });
  EXPECT_EQ(dim.line(), 1);
  const ParseError extra = CatchParse([] { ParseGame("1\n0.5\n0.5\n"); });
  EXPECT_EQ(extra.line(), 3);
  const ParseError bad = CatchParse([] { ParseGame("1\n0.5x\n"); });
  EXPECT_EQ(bad.column(), 1);
  EXPECT_NE(std::string(bad.what()).find("line 2"), std::string::npos);
  EXPECT_THROW(ParseGame(""), ParseError);
}

TEST(StrategyIoTest, ParsesAndRenormalizes) {
  const Strategy s = ParseStrategy("0.25 0.75\n", 2);
  EXPECT_EQ(s[0], 0.25);
  const Strategy t = ParseStrategy("0.3 0.3 0.4000000001");
  EXPECT_EQ(t.size(), 3);
  EXPECT_NEAR(t.vec().sum(), 1.0, 1e-15);
  EXPECT_LE((ParseStrategy(FormatStrategy(t)).vec() - t.vec()).cwiseAbs().maxCoeff(),
            1e-16);
}

TEST(StrategyIoTest, Rejects) {
  EXPECT_THROW(ParseStrategy("0.3 0.3 0.41"), ParseError);
  const ParseError neg = CatchParse([] { ParseStrategy("1.5 -0.5"); });
  EXPECT_EQ(neg.column(), 5);
  EXPECT_THROW(ParseStrategy("0.5 0.5", 3), ParseError);
  EXPECT_THROW(ParseStrategy("0.5 0.5\n0.5 0.5\n"), ParseError);
  EXPECT_THROW(ParseStrategy(""), ParseError);
}

TEST(StrategyIoTest, FileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/mrd_strategy.txt";
  const Strategy s = Strategy::Uniform(3);
  WriteStrategy(s, path);
  EXPECT_LE((ReadStrategy(path, 3).vec() - s.vec()).cwiseAbs().maxCoeff(),
            1e-16);
  EXPECT_THROW(ReadStrategy(path, 2), ParseError);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace mrd
