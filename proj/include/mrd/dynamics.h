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

#ifndef MRD_DYNAMICS_H_
#define MRD_DYNAMICS_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mrd/game.h"
#include "mrd/multiplier_solver.h"
#include "mrd/theta_solver.h"

// Replicator dynamics driven by the multiplier strategy:
//
//   dx_i/dt = x_i ((C z)_i - x.C z),   z = z(x) from the multiplier program.
//
// The orbit x is integrated; the multiplier z is the equilibrium candidate.
namespace mrd {

enum class StepMethod { kEuler, kRk4 };

struct DynamicsConfig {
  StepMethod method = StepMethod::kRk4;
  double h = 0.05;
  double h_min = 1e-6;
  double x_floor = 1e-12;
  double lyap_tol = 1e-8;
  double tol_eq = 1e-6;
  int stop_patience = 5;
  double t_max = 1e4;
  std::int64_t max_steps = 10'000'000;
  // Wall-clock budget in seconds; the default never triggers, keeping runs
  // deterministic.
  double max_wallclock = std::numeric_limits<double>::infinity();
  // Smallest coordinate accepted for the initial state.
  double interior_min = 1e-9;
  // The field is treated as zero below this max-norm.
  double stationary_tol = 1e-14;
  MultiplierConfig multiplier;
};

struct TraceRecord {
  double t = 0.0;
  Strategy x = Strategy::Uniform(1);
  Strategy z = Strategy::Uniform(1);
  double theta = 0.0;
  double eps = 0.0;
  double eta = 1.0;
  double lyapunov = 0.0;
  double gap_z = 0.0;
  double gap_x = 0.0;
  // Step that produced x; 0 for the initial record.
  double step_size = 0.0;
  // The multiplier solve at x did not meet its tolerances.
  bool solver_flagged = false;
};

// Multiplier and theta solutions at one state.
struct StateSolution {
  ThetaSolution theta;
  MultiplierSolution multiplier;
};

enum class RunStatus {
  kConverged,
  kTimeLimit,
  kStepBudget,
  kWallclockBudget,
  // A step was still rejected at h_min.
  kStepRejected,
};

struct RunResult {
  Strategy final_z = Strategy::Uniform(1);
  double final_gap = 0.0;
  bool converged = false;
  RunStatus status = RunStatus::kTimeLimit;
  // Filled only when Integrate runs without a sink.
  std::vector<TraceRecord> records;
  double wallclock = 0.0;
  std::int64_t steps = 0;
  std::int64_t rejected_steps = 0;
  std::int64_t flagged_solves = 0;
  double t_final = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double theta_final = 0.0;
  // Largest decrease of x.Sx over an accepted step (0 if none).
  double max_lyapunov_drop = 0.0;
  double best_gap = 0.0;
  Strategy final_x = Strategy::Uniform(1);
};

using TraceSink = std::function<void(const TraceRecord&)>;

// v_i = x_i ((Cz)_i - x.Cz).
VectorXd VectorField(const Game& g, const Strategy& x, const Strategy& z);

// Solves the theta and multiplier programs at x, warm-starting the latter.
StateSolution SolveState(const Game& g, const Strategy& x,
                         const MultiplierConfig& config,
                         const std::optional<MultiplierStart>& warm =
                             std::nullopt);

struct StepOutcome {
  // Unset when the step was rejected.
  std::optional<Strategy> x;
  // x.Sx(new) - x.Sx(old) when a candidate state was formed.
  double lyapunov_change = 0.0;
  // Some coordinate was <= 0 before clamping (or at an RK4 stage).
  bool left_simplex = false;
};

// One Euler or RK4 step of size h from x, whose multiplier solve is `at_x`.
// RK4 re-solves the multiplier at each stage point. The candidate is clamped
// to x_floor and renormalized; it is rejected if it left the simplex or x.Sx
// fell by more than lyap_tol.
StepOutcome Step(const Game& g, const Strategy& x, const StateSolution& at_x,
                 double h, const DynamicsConfig& config);

// Integrates from x0 until gap_z <= tol_eq on stop_patience consecutive
// records, t >= t_max, max_steps or max_wallclock. Every record is passed to `sink` when
// given; otherwise records are collected in RunResult::records.
// After at least one step, a state whose field is below stationary_tol with
// gap_z <= tol_eq converges at once. A step that reproduces x bitwise jumps
// to t_max, since every later step would do the same.
RunResult Integrate(const Game& g, const Strategy& x0,
                    const DynamicsConfig& config,
                    const TraceSink& sink = nullptr);

// JSON object with fields t, x, z, theta, eps, eta, lyapunov, gap_z, gap_x,
// step_size.
std::string TraceRecordJson(const TraceRecord& record);

// Writes one TraceRecordJson line per record.
class JsonlTraceWriter {
 public:
  explicit JsonlTraceWriter(const std::string& path);
  void Write(const TraceRecord& record);
  TraceSink Sink();

 private:
  std::ofstream out_;
};

}  // namespace mrd

#endif  // MRD_DYNAMICS_H_
