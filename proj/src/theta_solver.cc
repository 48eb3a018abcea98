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

#include "mrd/theta_solver.h"

#include <algorithm>
#include <cmath>

#include "mrd/math_core.h"

namespace mrd {
namespace {

constexpr double kInitialLo = 1e-6;
constexpr double kInitialHi = 1e6;
constexpr double kExpandedLo = 1e-9;
constexpr int kMaxIterations = 200;

// g(a) and dg/d(ln a) from one softmax pass.
struct DualEval {
  double g = 0.0;
  double slope = 0.0;
};

DualEval Evaluate(const Strategy& x, const VectorXd& b, double a) {
  double shift = -kInfinity;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) shift = std::max(shift, a * b[i]);
  }
  double total = 0.0, first = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!x.InCarrier(i)) continue;
    const double w = x[i] * std::exp(a * b[i] - shift);
    total += w;
    first += w * b[i];
  }
  const double mean = first / total;
  double var = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!x.InCarrier(i)) continue;
    const double w = x[i] * std::exp(a * b[i] - shift);
    var += w * (b[i] - mean) * (b[i] - mean);
  }
  var /= total;
  DualEval e;
  e.g = -mean + 0.25 / (a * a);
  e.slope = -a * var - 0.5 / (a * a);
  return e;
}

ThetaSolution Saturated(const Strategy& x, const VectorXd& b, bool failure) {
  ThetaSolution sol;
  sol.theta = 0.0;
  sol.alpha = kAlphaMax;
  sol.y = SoftmaxReweight(x, b, kAlphaMax);
  sol.dual_residual = std::abs(Evaluate(x, b, kAlphaMax).g);
  sol.saturated = true;
  sol.bracket_failure = failure;
  return sol;
}

}  // namespace

Strategy SoftmaxReweight(const Strategy& x, const VectorXd& b, double a) {
  if (b.size() != x.size()) throw DimensionError("dimension mismatch");
  double shift = -kInfinity;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) shift = std::max(shift, a * b[i]);
  }
  VectorXd z = VectorXd::Zero(x.size());
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) z[i] = x[i] * std::exp(a * b[i] - shift);
  }
  return Strategy::FromWeights(std::move(z));
}

double DualGapFunction(const Strategy& x, const VectorXd& b, double a) {
  if (b.size() != x.size()) throw DimensionError("dimension mismatch");
  return Evaluate(x, b, a).g;
}

ThetaSolution SolveThetaForB(const Strategy& x, const VectorXd& b) {
  if (b.size() != x.size()) throw DimensionError("dimension mismatch");
  if (!b.allFinite()) throw NumericError("non-finite B vector");

  double lo = std::log(kInitialLo);
  double hi = std::log(kInitialHi);
  if (Evaluate(x, b, kInitialLo).g <= 0.0) {
    lo = std::log(kExpandedLo);
    if (Evaluate(x, b, kExpandedLo).g <= 0.0) return Saturated(x, b, true);
  }
  if (Evaluate(x, b, kInitialHi).g > 0.0) {
    hi = std::log(kAlphaMax);
    if (Evaluate(x, b, kAlphaMax).g > 0.0) return Saturated(x, b, false);
  }

  // Safeguarded Newton in s = ln(alpha); g is strictly decreasing in s.
  double s = 0.5 * (lo + hi);
  DualEval e = Evaluate(x, b, std::exp(s));
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double a = std::exp(s);
    const double tol = 1e-10 * std::min(1.0, 0.25 / (a * a));
    if (std::abs(e.g) <= tol * 1e-3) break;
    if (e.g > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    if (hi - lo <= 1e-14 && std::abs(e.g) <= tol) break;
    double next = s - e.g / e.slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
    e = Evaluate(x, b, std::exp(s));
  }

  ThetaSolution sol;
  sol.alpha = std::exp(s);
  sol.theta = 1.0 / (2.0 * sol.alpha);
  sol.y = SoftmaxReweight(x, b, sol.alpha);
  sol.dual_residual = std::abs(e.g);
  return sol;
}

ThetaSolution SolveTheta(const Game& g, const Strategy& x) {
  const Strategy xc = x.OnCarrier();
  return SolveThetaForB(xc, BVector(g, xc));
}

}  // namespace mrd
