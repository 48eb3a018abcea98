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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrd/game_io.h"
#include "mrd/math_core.h"
#include "mrd/oracle.h"
#include "mrd/rng.h"

namespace mrd {
namespace {

using Json = nlohmann::ordered_json;

std::vector<double> ToVector(const Strategy& s) {
  return std::vector<double>(s.vec().data(), s.vec().data() + s.size());
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Runs `body`, mapping exceptions onto exit codes.
int Guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

void RequireInvertible(const Game& g) {
  if (!g.invertible()) {
    throw ValidationError(
        "payoff matrix is not invertible (determinant " +
        FormatDouble(g.determinant()) + ", rcond " +
        FormatDouble(g.cond_estimate()) + ")");
  }
}

Strategy InitialState(const Game& g, const RunConfig& config) {
  switch (config.x0_mode) {
    case X0Mode::kUniform:
      return Strategy::Uniform(g.n());
    case X0Mode::kFile:
      return ReadStrategy(config.x0_path, g.n());
    case X0Mode::kRandomInterior:
      return RandomInterior(g.n(), config.seed);
  }
  return Strategy::Uniform(g.n());
}

std::string StatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kTimeLimit:
      return "time_limit";
    case RunStatus::kStepBudget:
      return "step_budget";
    case RunStatus::kWallclockBudget:
      return "wallclock_budget";
    case RunStatus::kStepRejected:
      return "step_rejected";
  }
  return "unknown";
}

// Writes to `path`, or to `fallback` when path is empty.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

}  // namespace

void RunConfig::Validate() const {
  if (!(tol_eq > 0.0) || !(h > 0.0) || !(t_max > 0.0)) {
    throw ValidationError("tol, step and tmax must be positive");
  }
  if (!(abar > 0.0)) throw ValidationError("abar must be positive");
  if (max_iterations < 1 || !(feas_tol > 0.0) || !(kkt_tol > 0.0)) {
    throw ValidationError(
        "max-iterations, feas-tol and kkt-tol must be positive");
  }
  if (max_steps < 1) throw ValidationError("max-steps must be positive");
  if (x0_mode == X0Mode::kFile && x0_path.empty()) {
    throw ValidationError("x0 file path is empty");
  }
}

DynamicsConfig RunConfig::ToDynamics() const {
  DynamicsConfig d;
  d.method = method;
  d.h = h;
  d.tol_eq = tol_eq;
  d.t_max = t_max;
  d.max_steps = max_steps;
  d.multiplier.abar = abar;
  d.multiplier.max_iterations = max_iterations;
  d.multiplier.feas_tol = feas_tol;
  d.multiplier.kkt_tol = kkt_tol;
  return d;
}

Strategy RandomInterior(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n must be at least 1");
  SplitMix64 rng(seed);
  VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = std::max(-std::log1p(-rng.Uniform()), 1e-6);
  }
  return Strategy::FromWeights(std::move(w));
}

int CmdSolve(const std::string& game_path, const RunConfig& config,
             std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    config.Validate();
    const Game g = ReadGame(game_path);
    RequireInvertible(g);
    const Strategy x0 = InitialState(g, config);
    std::optional<JsonlTraceWriter> writer;
    TraceSink sink = [](const TraceRecord&) {};
    if (!config.trace_path.empty()) {
      writer.emplace(config.trace_path);
      sink = writer->Sink();
    }
    const RunResult r = Integrate(g, x0, config.ToDynamics(), sink);
    spdlog::info("solve: status {} after {} steps, t = {}, {} flagged solves",
                 StatusName(r.status), r.steps, r.t_final, r.flagged_solves);
    Json j;
    j["converged"] = r.converged;
    j["final_gap"] = r.final_gap;
    j["theta_final"] = r.theta_final;
    j["steps"] = r.steps;
    j["wallclock"] = config.omit_wallclock ? 0.0 : r.wallclock;
    j["z"] = ToVector(r.final_z);
    out << j.dump() << "\n";
    return r.converged ? kExitOk : kExitNotConverged;
  });
}

int CmdVerify(const std::string& game_path, const std::string& strategy_path,
              double eps, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    if (!(eps >= 0.0)) throw ValidationError("eps must be nonnegative");
    const Game g = ReadGame(game_path);
    const Strategy z = ReadStrategy(strategy_path, g.n());
    const double gap = EquilibriumGap(g, z);
    const bool ok = VerifyEquilibrium(g, z, eps);
    Json j;
    j["gap"] = gap;
    j["eps"] = eps;
    j["verified"] = ok;
    out << j.dump() << "\n";
    return ok ? kExitOk : kExitRejected;
  });
}

int CmdOracle(const std::string& game_path, std::ostream& out,
              std::ostream& err) {
  return Guard(err, [&] {
    const Game g = ReadGame(game_path);
    const auto certs = EnumerateSymmetricEquilibria(g);
    for (const EquilibriumCertificate& c : certs) {
      Json j;
      j["z"] = ToVector(c.z);
      j["gap"] = c.gap;
      j["support"] = c.support;
      out << j.dump() << "\n";
    }
    if (certs.empty()) {
      err << "internal error: no symmetric equilibrium found\n";
      return static_cast<int>(kExitInternal);
    }
    return static_cast<int>(kExitOk);
  });
}

int CmdGen(const GenSpec& spec, const std::string& out_path,
           std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const Game g = Generate(spec);
    if (out_path.empty()) {
      out << FormatGame(g);
    } else {
      WriteGame(g, out_path);
    }
    return static_cast<int>(kExitOk);
  });
}

int CmdBench(int n, int count, std::uint64_t seed, const RunConfig& config,
             const std::string& out_path, std::ostream& out,
             std::ostream& err) {
  return Guard(err, [&] {
    config.Validate();
    if (n < 1) throw ValidationError("n must be at least 1");
    if (count < 0) throw ValidationError("count must be nonnegative");
    const DynamicsConfig dyn = config.ToDynamics();
    OutputTarget target(out_path, out);
    std::ostream& csv = target.stream();
    csv << kBenchHeader << "\n";
    for (int k = 0; k < count; ++k) {
      GenSpec spec;
      spec.n = n;
      spec.seed = seed + static_cast<std::uint64_t>(k);
      const Game g = Generate(spec);
      const RunResult r =
          Integrate(g, Strategy::Uniform(n), dyn, [](const TraceRecord&) {});
      std::string match = "";
      if (n <= kOracleMaxN) {
        const auto certs = EnumerateSymmetricEquilibria(g);
        match = MatchEquilibrium(certs, r.final_z, kOracleMatchTol) >= 0
                    ? "1"
                    : "0";
      }
      csv << spec.seed << ',' << n << ',' << (r.converged ? 1 : 0) << ','
          << r.steps << ',' << FormatDouble(r.final_gap) << ',' << match
          << ',' << FormatDouble(r.theta_min) << ','
          << FormatDouble(r.theta_max) << ','
          << FormatDouble(config.omit_wallclock ? 0.0 : r.wallclock) << "\n";
      csv.flush();
      spdlog::info("bench: seed {} status {} steps {}", spec.seed,
                   StatusName(r.status), r.steps);
    }
    return static_cast<int>(kExitOk);
  });
}

void ConfigureLogging() {
  auto logger = spdlog::get("mrd");
  if (!logger) logger = spdlog::stderr_color_mt("mrd");
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("MRD_LOG"); env != nullptr && *env) {
    level = spdlog::level::from_str(env);
  }
  spdlog::set_level(level);
}

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiplier replicator dynamics for symmetric games"};
  app.require_subcommand(1);

  RunConfig run;
  std::string game_path;
  std::string x0 = "uniform";
  std::string method = "rk4";
  std::string out_path;
  std::string dist = "uniform";
  std::uint64_t seed = 0;
  double eps = 1e-6;
  int n = 3;
  int count = 10;
  double min_entry = 1e-3;

  const auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--tol", run.tol_eq, "equilibrium gap tolerance");
    cmd->add_option("--tmax", run.t_max, "time limit");
    cmd->add_option("--step", run.h, "initial step size");
    cmd->add_option("--method", method, "integrator")
        ->check(CLI::IsMember({"euler", "rk4"}));
    cmd->add_option("--abar", run.abar, "Jensen gap constant");
    cmd->add_option("--max-steps", run.max_steps, "step budget");
    cmd->add_option("--max-iterations", run.max_iterations,
                    "Newton iteration cap of the multiplier solver");
    cmd->add_option("--feas-tol", run.feas_tol,
                    "multiplier solver feasibility tolerance");
    cmd->add_option("--kkt-tol", run.kkt_tol,
                    "multiplier solver stationarity tolerance");
    cmd->add_flag("--omit-wallclock", run.omit_wallclock,
                  "report wallclock as 0");
  };

  CLI::App* solve = app.add_subcommand("solve", "integrate the dynamics");
  solve->add_option("--game", game_path, "game file")->required();
  solve->add_option("--x0", x0, "uniform, random or a strategy file");
  solve->add_option("--trace", run.trace_path, "JSONL trace output");
  solve->add_option("--seed", seed, "seed for --x0 random");
  add_run_options(solve);

  CLI::App* verify = app.add_subcommand("verify", "check an equilibrium");
  verify->add_option("--game", game_path, "game file")->required();
  verify->add_option("--x0,--strategy", x0, "strategy file")->required();
  verify->add_option("--eps", eps, "gap tolerance");

  CLI::App* oracle =
      app.add_subcommand("oracle", "list symmetric equilibria");
  oracle->add_option("--game", game_path, "game file")->required();

  CLI::App* gen = app.add_subcommand("gen", "generate a random game");
  gen->add_option("--n", n, "dimension")->required();
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--dist", dist, "distribution")
      ->check(CLI::IsMember({"uniform", "cyclic", "coordination"}));
  gen->add_option("--min-entry", min_entry, "smallest payoff");
  gen->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* bench = app.add_subcommand("bench", "benchmark seeded games");
  bench->add_option("--n", n, "dimension")->required();
  bench->add_option("--count", count, "number of games");
  bench->add_option("--seed", seed, "first seed");
  bench->add_option("--out", out_path, "CSV output (default stdout)");
  add_run_options(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk)
                     : static_cast<int>(kExitInvalidInput);
  }

  run.method = method == "euler" ? StepMethod::kEuler : StepMethod::kRk4;
  run.seed = seed;
  if (x0 == "uniform") {
    run.x0_mode = X0Mode::kUniform;
  } else if (x0 == "random") {
    run.x0_mode = X0Mode::kRandomInterior;
  } else {
    run.x0_mode = X0Mode::kFile;
    run.x0_path = x0;
  }

  if (*solve) return CmdSolve(game_path, run, out, err);
  if (*verify) return CmdVerify(game_path, x0, eps, out, err);
  if (*oracle) return CmdOracle(game_path, out, err);
  if (*gen) {
    GenSpec spec;
    spec.n = n;
    spec.seed = seed;
    spec.min_entry = min_entry;
    spec.distribution = ParseDistribution(dist);
    return CmdGen(spec, out_path, out, err);
  }
  if (*bench) return CmdBench(n, count, seed, run, out_path, out, err);
  return kExitInvalidInput;
}

}  // namespace mrd
