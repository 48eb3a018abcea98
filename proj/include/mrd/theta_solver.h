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

#ifndef MRD_THETA_SOLVER_H_
#define MRD_THETA_SOLVER_H_

#include "mrd/game.h"

// The entropy-regularized program
//
//   minimize RE(Z, X) - theta  s.t.  sum_i Z_i B_i >= theta^2,  Z in simplex
//
// solved through its dual: the optimal Z is the softmax reweighting of X by
// alpha * B, theta = 1 / (2 alpha), and alpha is the unique root of the
// strictly decreasing function
//
//   g(alpha) = -sum_i Z_i(alpha) B_i + 1 / (4 alpha^2).
namespace mrd {

// Upper end of the alpha search; no root below it means theta = 0.
inline constexpr double kAlphaMax = 1e9;
// Below this theta the multiplier program uses its equality regime.
inline constexpr double kThetaZero = 1e-8;

struct ThetaSolution {
  double theta = 0.0;
  double alpha = kAlphaMax;
  // Primal optimizer Y_X; supported on carrier(x).
  Strategy y = Strategy::Uniform(1);
  // |g(alpha)| at the returned alpha.
  double dual_residual = 0.0;
  // No root below kAlphaMax: theta treated as 0.
  bool saturated = false;
  // The bracket could not be established inside [1e-9, 1e9].
  bool bracket_failure = false;
};

// z_i = x_i exp(a b_i) / sum_j x_j exp(a b_j), max-shifted over carrier(x).
Strategy SoftmaxReweight(const Strategy& x, const VectorXd& b, double a);

// g(a) above.
double DualGapFunction(const Strategy& x, const VectorXd& b, double a);

// Root-finds g for an arbitrary B vector. Throws NumericError on non-finite b.
ThetaSolution SolveThetaForB(const Strategy& x, const VectorXd& b);

// SolveThetaForB(x, BVector(g, x)) with x restricted to its carrier.
ThetaSolution SolveTheta(const Game& g, const Strategy& x);

}  // namespace mrd

#endif  // MRD_THETA_SOLVER_H_
