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

#include "mrd/dynamics.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "mrd/math_core.h"
#include "mrd/oracle.h"
#include "test_util.h"

namespace mrd {
namespace {

using testing::RandomGame;
using testing::RandomInteriorPoint;

Strategy S2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return Strategy::FromWeights(v);
}

MatrixXd Coordination() {
  MatrixXd c(2, 2);
  c << 1.0, 0.2, 0.2, 1.0;
  return c;
}

MatrixXd Cyclic() {
  MatrixXd c(3, 3);
  c << 0.5, 1.0, 0.1, 0.1, 0.5, 1.0, 1.0, 0.1, 0.5;
  return c;
}

TEST(VectorFieldTest, Examples) {
  const Game cyc = Game::FromMatrix(Cyclic());
  EXPECT_LE(VectorField(cyc, Strategy::Uniform(3), Strategy::Uniform(3))
                .cwiseAbs()
                .maxCoeff(),
            1e-16);
  SplitMix64 rng(41);
  const Game g = RandomGame(3, rng);
  EXPECT_EQ(VectorField(g, Strategy::Pure(3, 0), RandomInteriorPoint(3, rng))
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  // Cz = (0.8, 0.6) with C = [[0.8, 0.8], [0.6, 0.6]].
  MatrixXd c(2, 2);
  c << 0.8, 0.8, 0.6, 0.6;
  const VectorXd v =
      VectorField(Game::FromMatrix(c), S2(0.5, 0.5), S2(0.3, 0.7));
  EXPECT_NEAR(v[0], 0.05, 1e-16);
  EXPECT_NEAR(v[1], -0.05, 1e-16);
}

TEST(VectorFieldTest, TangentToSimplex) {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Game g = RandomGame(n, rng);
    const VectorXd v = VectorField(g, RandomInteriorPoint(n, rng),
                                   RandomInteriorPoint(n, rng));
    EXPECT_LE(std::abs(v.sum()), 1e-14);
  }
}

TEST(StepTest, FixedPointIsExactlyStationary) {
  const Game g = Game::FromMatrix(Cyclic());
  const Strategy x = Strategy::Uniform(3);
  DynamicsConfig config;
  const StateSolution sol = SolveState(g, x, config.multiplier);
  EXPECT_LE(EquilibriumGap(g, sol.multiplier.z), 1e-9);
  for (StepMethod method : {StepMethod::kEuler, StepMethod::kRk4}) {
    config.method = method;
    const StepOutcome out = Step(g, x, sol, 0.05, config);
    ASSERT_TRUE(out.x.has_value());
    EXPECT_LE((out.x->vec() - x.vec()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(StepTest, SingleStrategyStaysPut) {
  const Game g = Game::FromMatrix(MatrixXd::Constant(1, 1, 0.4));
  const Strategy x = Strategy::Uniform(1);
  DynamicsConfig config;
  const StepOutcome out =
      Step(g, x, SolveState(g, x, config.multiplier), 0.05, config);
  ASSERT_TRUE(out.x.has_value());
  EXPECT_EQ((*out.x)[0], 1.0);
}

TEST(StepTest, EulerDecayIsAtMostExponential) {
  SplitMix64 rng(43);
  DynamicsConfig config;
  config.method = StepMethod::kEuler;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Game g = RandomGame(n, rng);
    const Strategy x = RandomInteriorPoint(n, rng);
    const StateSolution sol = SolveState(g, x, config.multiplier);
    const double h = 0.05;
    const StepOutcome out = Step(g, x, sol, h, config);
    if (!out.x) continue;
    const VectorXd cz = g.C() * sol.multiplier.z.vec();
    const double range = cz.maxCoeff() - cz.minCoeff();
    for (int i = 0; i < n; ++i) {
      EXPECT_GE((*out.x)[i], x[i] * std::exp(-(1 + 1e-6) * h * range));
    }
  }
}

TEST(StepTest, RejectsNonPositiveStep) {
  const Game g = Game::FromMatrix(Coordination());
  const Strategy x = S2(0.6, 0.4);
  DynamicsConfig config;
  EXPECT_THROW(Step(g, x, SolveState(g, x, config.multiplier), 0.0, config),
               ValidationError);
}

TEST(IntegrateTest, StationaryStartConvergesAtOnce) {
  const Game g = Game::FromMatrix(Cyclic());
  const RunResult r = Integrate(g, Strategy::Uniform(3), DynamicsConfig());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 1);
  EXPECT_LE(r.final_gap, 1e-6);
  EXPECT_LE(EquilibriumGap(g, r.final_z), 1e-9);
}

TEST(IntegrateTest, SingleStrategyConvergesInOneStep) {
  const Game g = Game::FromMatrix(MatrixXd::Constant(1, 1, 0.7));
  const RunResult r = Integrate(g, Strategy::Uniform(1), DynamicsConfig());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 1);
  EXPECT_EQ(r.final_z[0], 1.0);
}

TEST(IntegrateTest, RejectsBoundaryStart) {
  const Game g = Game::FromMatrix(Coordination());
  EXPECT_THROW(Integrate(g, S2(1.0, 1e-12), DynamicsConfig()),
               ValidationError);
  EXPECT_THROW(Integrate(g, Strategy::Uniform(3), DynamicsConfig()),
               DimensionError);
}

// Runs the coordination game from (0.6, 0.4) with the given constant in the
// Jensen constraints and checks the certificate against the oracle.
void ExpectCoordinationCertificate(double abar) {
  const Game g = Game::FromMatrix(Coordination());
  DynamicsConfig config;
  config.multiplier.abar = abar;
  const RunResult r = Integrate(g, S2(0.6, 0.4), config);
  ASSERT_TRUE(r.converged) << "abar " << abar;
  EXPECT_LE(r.final_gap, 1e-6);
  EXPECT_LE(testing::PlainGap(g.C(), r.final_z.vec()), 1e-3);
  const auto certs = EnumerateSymmetricEquilibria(g);
  EXPECT_GE(MatchEquilibrium(certs, r.final_z, 1e-2), 0) << "abar " << abar;
  for (size_t k = 0; k < r.records.size(); ++k) {
    const TraceRecord& rec = r.records[k];
    EXPECT_LE(std::abs(rec.x.vec().sum() - 1.0), 1e-12);
    EXPECT_GE(rec.x.vec().minCoeff(), 0.0);
    if (k > 0) EXPECT_GE(rec.lyapunov, r.records[k - 1].lyapunov - 1e-8);
  }
}

TEST(IntegrateTest, CoordinationReachesAnEquilibrium) {
  ExpectCoordinationCertificate(1.0);
}

TEST(IntegrateTest, JensenConstantDoesNotChangeTheOutcome) {
  ExpectCoordinationCertificate(0.5);
  ExpectCoordinationCertificate(2.0);
}

TEST(IntegrateTest, CyclicReachesUniform) {
  const Game g = Game::FromMatrix(Cyclic());
  VectorXd x0(3);
  x0 << 0.5, 0.3, 0.2;
  DynamicsConfig config;
  config.tol_eq = 1e-3;
  const RunResult r = Integrate(g, Strategy::FromWeights(x0), config,
                                [](const TraceRecord&) {});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(testing::PlainGap(g.C(), r.final_z.vec()), 1e-3);
  // The gap grows linearly away from the uniform point, so a gap of 1e-3
  // only pins z to within a few 1e-3.
  EXPECT_LE((r.final_z.vec() - Strategy::Uniform(3).vec()).cwiseAbs().maxCoeff(),
            1e-2);
}

TEST(IntegrateTest, ConvergedImpliesCertifiedGap) {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 6; ++trial) {
    const Game g = RandomGame(2 + trial % 2, rng);
    DynamicsConfig config;
    config.tol_eq = 1e-3;
    config.t_max = 200.0;
    const RunResult r = Integrate(g, Strategy::Uniform(g.n()), config,
                                  [](const TraceRecord&) {});
    EXPECT_LE(r.theta_min, r.theta_max);
    if (r.converged) {
      EXPECT_LE(testing::PlainGap(g.C(), r.final_z.vec()), 1e-3);
    }
  }
}

TEST(IntegrateTest, WallclockBudgetStopsTheRun) {
  const Game g = Game::FromMatrix(Coordination());
  DynamicsConfig config;
  config.max_wallclock = 0.0;
  const RunResult r = Integrate(g, S2(0.6, 0.4), config);
  EXPECT_EQ(r.status, RunStatus::kWallclockBudget);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.records.size(), 1u);
}

TEST(TraceTest, JsonFieldsInOrder) {
  TraceRecord rec;
  rec.t = 0.5;
  rec.x = S2(0.25, 0.75);
  rec.z = S2(0.5, 0.5);
  const nlohmann::json j = nlohmann::json::parse(TraceRecordJson(rec));
  const std::vector<std::string> keys = {"t",   "x",        "z",     "theta",
                                         "eps", "eta",      "lyapunov",
                                         "gap_z", "gap_x",  "step_size"};
  std::vector<std::string> got;
  const nlohmann::ordered_json ordered =
      nlohmann::ordered_json::parse(TraceRecordJson(rec));
  for (const auto& item : ordered.items()) got.push_back(item.key());
  EXPECT_EQ(got, keys);
  EXPECT_EQ(j["x"][1].get<double>(), 0.75);
}

TEST(TraceTest, WriterEmitsOneLinePerRecord) {
  const std::string path = ::testing::TempDir() + "/mrd_trace.jsonl";
  const Game g = Game::FromMatrix(Coordination());
  DynamicsConfig config;
  config.tol_eq = 1e-3;
  int count = 0;
  {
    JsonlTraceWriter writer(path);
    const auto sink = writer.Sink();
    Integrate(g, S2(0.6, 0.4), config, [&](const TraceRecord& rec) {
      ++count;
      sink(rec);
    });
  }
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("gap_z"));
    ++lines;
  }
  EXPECT_EQ(lines, count);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace mrd
