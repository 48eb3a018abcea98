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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "json.hpp"
#include "mrd/math_core.h"

namespace mrd {
namespace {

MultiplierStart WarmFrom(const MultiplierSolution& sol) {
  MultiplierStart start;
  start.z = sol.z;
  start.eps = sol.eps;
  start.eta = sol.eta;
  return start;
}

// x + a * k as a strategy, or nullopt if a coordinate is not positive.
std::optional<Strategy> StagePoint(const Strategy& x, double a,
                                   const VectorXd& k) {
  VectorXd y = x.vec() + a * k;
  if (!(y.minCoeff() > 0.0) || !y.allFinite()) return std::nullopt;
  return Strategy::FromWeights(std::move(y));
}

TraceRecord MakeRecord(const Game& g, double t, const Strategy& x,
                       const StateSolution& sol, double step_size) {
  TraceRecord rec;
  rec.t = t;
  rec.x = x;
  rec.z = sol.multiplier.z;
  rec.theta = sol.theta.theta;
  rec.eps = sol.multiplier.eps;
  rec.eta = sol.multiplier.eta;
  rec.lyapunov = LyapunovValue(g, x);
  rec.gap_z = EquilibriumGap(g, sol.multiplier.z);
  rec.gap_x = EquilibriumGap(g, x);
  rec.step_size = step_size;
  rec.solver_flagged = !sol.multiplier.converged;
  return rec;
}

std::vector<double> ToVector(const Strategy& s) {
  return std::vector<double>(s.vec().data(), s.vec().data() + s.size());
}

}  // namespace

VectorXd VectorField(const Game& g, const Strategy& x, const Strategy& z) {
  if (x.size() != g.n() || z.size() != g.n()) {
    throw DimensionError("dimension mismatch");
  }
  const VectorXd cz = g.C() * z.vec();
  const double mean = x.vec().dot(cz);
  return x.vec().cwiseProduct((cz.array() - mean).matrix());
}

StateSolution SolveState(const Game& g, const Strategy& x,
                         const MultiplierConfig& config,
                         const std::optional<MultiplierStart>& warm) {
  StateSolution sol;
  sol.theta = SolveTheta(g, x);
  sol.multiplier = SolveMultiplier(g, x, sol.theta, config, warm);
  return sol;
}

StepOutcome Step(const Game& g, const Strategy& x, const StateSolution& at_x,
                 double h, const DynamicsConfig& config) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  StepOutcome out;
  const VectorXd k1 = VectorField(g, x, at_x.multiplier.z);
  VectorXd raw;
  if (config.method == StepMethod::kEuler) {
    raw = x.vec() + h * k1;
  } else {
    const MultiplierStart warm = WarmFrom(at_x.multiplier);
    VectorXd k[3];
    const double offsets[3] = {0.5 * h, 0.5 * h, h};
    const VectorXd* prev = &k1;
    for (int s = 0; s < 3; ++s) {
      const auto stage = StagePoint(x, offsets[s], *prev);
      if (!stage) {
        out.left_simplex = true;
        return out;
      }
      const StateSolution sol =
          SolveState(g, *stage, config.multiplier, warm);
      k[s] = VectorField(g, *stage, sol.multiplier.z);
      prev = &k[s];
    }
    raw = x.vec() + (h / 6.0) * (k1 + 2.0 * k[0] + 2.0 * k[1] + k[2]);
  }
  if (!raw.allFinite() || !(raw.minCoeff() > 0.0)) {
    out.left_simplex = true;
    return out;
  }
  raw = raw.cwiseMax(config.x_floor);
  Strategy next = Strategy::FromWeights(std::move(raw));
  out.lyapunov_change = LyapunovValue(g, next) - LyapunovValue(g, x);
  if (out.lyapunov_change < -config.lyap_tol) return out;
  out.x = std::move(next);
  return out;
}

RunResult Integrate(const Game& g, const Strategy& x0,
                    const DynamicsConfig& config, const TraceSink& sink) {
  if (x0.size() != g.n()) throw DimensionError("dimension mismatch");
  if (x0.vec().minCoeff() < config.interior_min) {
    throw ValidationError("initial strategy is not strictly interior");
  }
  if (!(config.h > 0.0) || !(config.t_max > 0.0) || !(config.tol_eq > 0.0)) {
    throw ValidationError("h, t_max and tol_eq must be positive");
  }
  const auto start_clock = std::chrono::steady_clock::now();

  RunResult result;
  Strategy x = x0;
  double t = 0.0;
  double h_try = config.h;
  double last_h = 0.0;
  int streak = 0;
  bool first = true;
  Strategy best_z = x0;
  StateSolution sol = SolveState(g, x, config.multiplier);

  while (true) {
    const TraceRecord rec = MakeRecord(g, t, x, sol, last_h);
    if (rec.solver_flagged) ++result.flagged_solves;
    if (first || rec.theta < result.theta_min) result.theta_min = rec.theta;
    if (first || rec.theta > result.theta_max) result.theta_max = rec.theta;
    if (first || rec.gap_z < result.best_gap) {
      result.best_gap = rec.gap_z;
      best_z = rec.z;
    }
    first = false;
    result.theta_final = rec.theta;
    if (sink) {
      sink(rec);
    } else {
      result.records.push_back(rec);
    }

    streak = rec.gap_z <= config.tol_eq ? streak + 1 : 0;
    // Checked after the first step so every run advances at least once.
    const bool stationary =
        result.steps > 0 &&
        VectorField(g, x, sol.multiplier.z).cwiseAbs().maxCoeff() <=
            config.stationary_tol;
    if (streak >= config.stop_patience ||
        (stationary && rec.gap_z <= config.tol_eq)) {
      result.status = RunStatus::kConverged;
      break;
    }
    if (t >= config.t_max) {
      result.status = RunStatus::kTimeLimit;
      break;
    }
    if (result.steps >= config.max_steps) {
      result.status = RunStatus::kStepBudget;
      break;
    }
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_clock)
            .count() > config.max_wallclock) {
      result.status = RunStatus::kWallclockBudget;
      break;
    }

    double h = h_try;
    StepOutcome out;
    while (true) {
      out = Step(g, x, sol, h, config);
      if (out.x) break;
      ++result.rejected_steps;
      if (h * 0.5 < config.h_min) break;
      h *= 0.5;
    }
    if (!out.x) {
      result.status = RunStatus::kStepRejected;
      break;
    }
    result.max_lyapunov_drop =
        std::max(result.max_lyapunov_drop, -out.lyapunov_change);
    ++result.steps;
    if (out.x->vec() == x.vec()) {
      // Every later step reproduces this state and record exactly.
      t = std::max(t + h, config.t_max);
      result.status = rec.gap_z <= config.tol_eq ? RunStatus::kConverged
                                                 : RunStatus::kTimeLimit;
      break;
    }
    const MultiplierStart warm = WarmFrom(sol.multiplier);
    x = std::move(*out.x);
    t += h;
    last_h = h;
    h_try = std::min(config.h, 2.0 * h);
    sol = SolveState(g, x, config.multiplier, warm);
  }

  result.converged = result.status == RunStatus::kConverged;
  result.final_x = x;
  if (result.converged) {
    result.final_z = sol.multiplier.z;
  } else {
    result.final_z = best_z;
  }
  result.final_gap = EquilibriumGap(g, result.final_z);
  result.t_final = t;
  result.wallclock = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
  return result;
}

std::string TraceRecordJson(const TraceRecord& record) {
  nlohmann::ordered_json j;
  j["t"] = record.t;
  j["x"] = ToVector(record.x);
  j["z"] = ToVector(record.z);
  j["theta"] = record.theta;
  j["eps"] = record.eps;
  j["eta"] = record.eta;
  j["lyapunov"] = record.lyapunov;
  j["gap_z"] = record.gap_z;
  j["gap_x"] = record.gap_x;
  j["step_size"] = record.step_size;
  return j.dump();
}

JsonlTraceWriter::JsonlTraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw Error("cannot open trace file " + path);
}

void JsonlTraceWriter::Write(const TraceRecord& record) {
  out_ << TraceRecordJson(record) << '\n';
}

TraceSink JsonlTraceWriter::Sink() {
  return [this](const TraceRecord& record) { Write(record); };
}

}  // namespace mrd
