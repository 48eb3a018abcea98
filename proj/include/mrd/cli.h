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

#ifndef MRD_CLI_H_
#define MRD_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mrd/dynamics.h"
#include "mrd/gamegen.h"

// Command-line front end. Subcommands:
//
//   solve  --game F [--x0 uniform|random|FILE] [--tol] [--tmax] [--step]
//          [--method euler|rk4] [--abar] [--trace FILE] [--seed]
//          [--max-steps]
//   verify --game F --x0 FILE [--eps]
//   oracle --game F
//   gen    --n N --seed S [--dist uniform|cyclic|coordination] [--out FILE]
//   bench  --n N --count K --seed S [--out FILE] plus the solve options
//
// solve prints one JSON line {converged, final_gap, theta_final, steps,
// wallclock, z}; bench prints CSV with kBenchHeader. MRD_LOG sets the stderr
// log level (trace, debug, info, warn, error, off; default warn).
namespace mrd {

enum ExitCode : int {
  kExitOk = 0,
  // verify: gap above eps.
  kExitRejected = 1,
  kExitInvalidInput = 2,
  kExitNotConverged = 3,
  kExitInternal = 4,
};

inline constexpr char kBenchHeader[] =
    "seed,n,converged,steps,final_gap,oracle_match,theta_min,theta_max,"
    "wallclock";

// Distance (max norm) within which bench counts a match with an oracle
// equilibrium.
inline constexpr double kOracleMatchTol = 1e-2;

enum class X0Mode { kUniform, kFile, kRandomInterior };

struct RunConfig {
  double tol_eq = 1e-6;
  double t_max = 1e4;
  double h = 0.05;
  StepMethod method = StepMethod::kRk4;
  // Multiplier solver settings; see MultiplierConfig.
  double abar = 1.0;
  int max_iterations = MultiplierConfig().max_iterations;
  double feas_tol = MultiplierConfig().feas_tol;
  double kkt_tol = MultiplierConfig().kkt_tol;
  X0Mode x0_mode = X0Mode::kUniform;
  std::string x0_path;
  std::uint64_t seed = 0;
  std::string trace_path;
  std::int64_t max_steps = 10'000'000;
  // Report wallclock as 0 so repeated runs give identical bytes.
  bool omit_wallclock = false;

  // Throws ValidationError unless tol_eq, h, t_max and the solver settings
  // are positive.
  void Validate() const;
  DynamicsConfig ToDynamics() const;
};

// Strictly interior point with exponential(1) weights from SplitMix64(seed),
// each weight floored at 1e-6 before normalization.
Strategy RandomInterior(int n, std::uint64_t seed);

// Each command writes results to `out`, diagnostics to `err`, and returns an
// ExitCode. Exceptions are mapped: ValidationError and DimensionError to 2,
// anything else to 4.
int CmdSolve(const std::string& game_path, const RunConfig& config,
             std::ostream& out, std::ostream& err);
int CmdVerify(const std::string& game_path, const std::string& strategy_path,
              double eps, std::ostream& out, std::ostream& err);
int CmdOracle(const std::string& game_path, std::ostream& out,
              std::ostream& err);
int CmdGen(const GenSpec& spec, const std::string& out_path,
           std::ostream& out, std::ostream& err);
// Games use seeds seed, seed + 1, ..., seed + count - 1 with the uniform
// distribution and start from the uniform strategy.
int CmdBench(int n, int count, std::uint64_t seed, const RunConfig& config,
             const std::string& out_path, std::ostream& out,
             std::ostream& err);

// Installs the stderr logger at the level named by MRD_LOG.
void ConfigureLogging();

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mrd

#endif  // MRD_CLI_H_
