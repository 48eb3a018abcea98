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

#ifndef MRD_MATH_CORE_H_
#define MRD_MATH_CORE_H_

#include <limits>

#include "mrd/game.h"

// Scalar and vector kernels shared by the solvers. Every x-weighted sum runs
// over carrier(x) only, so boundary strategies are handled exactly.
namespace mrd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// sum_{i in carrier(p)} p_i ln(p_i / q_i). Returns kInfinity when
// carrier(p) is not contained in carrier(q).
double RelativeEntropy(const Strategy& p, const Strategy& q);

// ln(sum_i x_i exp(a v_i)), max-shifted over carrier(x).
double WeightedLogSumExp(const Strategy& x, const VectorXd& v, double a);

// exp(d) - 1 - d to full relative precision.
double ExpM1MinusLinear(double d);

// WeightedLogSumExp(x, v, a) - a * x.v, the Jensen gap of exp along x.
// Zero iff v is constant on carrier(x).
double JensenGap(const Strategy& x, const VectorXd& v, double a);

// JensenGap(x, m z, a).
double JensenGap(const Strategy& x, const MatrixXd& m, const Strategy& z,
                 double a);

// B_i = (x.Sx)^-1 sum_j C_ji x_j (Sx)_j - (C^T x)_i.
// Satisfies sum_i z_i B_i = (x.Sx)^-1 sum_i x_i (Sx)_i (Cz)_i - x.Cz.
// Throws DegenerateGameError when x.Sx <= 0.
VectorXd BVector(const Game& g, const Strategy& x);

// x.Sx = |C^T x|^2.
double LyapunovValue(const Game& g, const Strategy& x);

// (m z)_max - z.m z.
double EquilibriumGap(const MatrixXd& m, const Strategy& z);
double EquilibriumGap(const Game& g, const Strategy& z);

// True iff max_{i in carrier(x)} |(m x)_i - x.m x| <= tol.
bool IsFixedPoint(const MatrixXd& m, const Strategy& x, double tol);

}  // namespace mrd

#endif  // MRD_MATH_CORE_H_
