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

#include "mrd/math_core.h"

#include <algorithm>
#include <cmath>

namespace mrd {
namespace {

void CheckSize(int expected, Eigen::Index actual) {
  if (actual != expected) throw DimensionError("dimension mismatch");
}

// Carrier-restricted weights renormalized to sum to one.
double CarrierMass(const Strategy& x) {
  double mass = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) mass += x[i];
  }
  return mass;
}

}  // namespace

double RelativeEntropy(const Strategy& p, const Strategy& q) {
  CheckSize(p.size(), q.size());
  double re = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (!p.InCarrier(i)) continue;
    if (!q.InCarrier(i)) return kInfinity;
    re += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(re, 0.0);
}

double WeightedLogSumExp(const Strategy& x, const VectorXd& v, double a) {
  CheckSize(x.size(), v.size());
  double shift = -kInfinity;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) shift = std::max(shift, a * v[i]);
  }
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) sum += x[i] * std::exp(a * v[i] - shift);
  }
  return shift + std::log(sum / CarrierMass(x));
}

double ExpM1MinusLinear(double d) {
  if (std::abs(d) >= 0.25) return std::expm1(d) - d;
  // Taylor series from d^2 / 2; 17 terms reach rounding for |d| < 0.25.
  double term = 1.0;
  for (int k = 18; k >= 3; --k) term = 1.0 + term * d / k;
  return 0.5 * d * d * term;
}

double JensenGap(const Strategy& x, const VectorXd& v, double a) {
  CheckSize(x.size(), v.size());
  const double mass = CarrierMass(x);
  double mean = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) mean += x[i] * v[i];
  }
  mean /= mass;
  // Shift by the mean rather than the max. The linear terms sum to zero, so
  // dropping them leaves nonnegative terms with full relative precision.
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i)) sum += x[i] * ExpM1MinusLinear(a * (v[i] - mean));
  }
  const double ratio = sum / mass;
  if (ratio > 1e300) {
    return WeightedLogSumExp(x, v, a) - a * mean;
  }
  return std::log1p(ratio);
}

double JensenGap(const Strategy& x, const MatrixXd& m, const Strategy& z,
                 double a) {
  CheckSize(x.size(), m.rows());
  CheckSize(z.size(), m.cols());
  return JensenGap(x, VectorXd(m * z.vec()), a);
}

VectorXd BVector(const Game& g, const Strategy& x) {
  CheckSize(g.n(), x.size());
  const VectorXd sx = g.S() * x.vec();
  const double q = x.vec().dot(sx);
  if (!(q > 0.0)) throw DegenerateGameError("x.Sx <= 0");
  const VectorXd weighted = x.vec().cwiseProduct(sx);
  return (g.C().transpose() * weighted) / q - g.C().transpose() * x.vec();
}

double LyapunovValue(const Game& g, const Strategy& x) {
  CheckSize(g.n(), x.size());
  return (g.C().transpose() * x.vec()).squaredNorm();
}

double EquilibriumGap(const MatrixXd& m, const Strategy& z) {
  CheckSize(z.size(), m.cols());
  const VectorXd mz = m * z.vec();
  return mz.maxCoeff() - z.vec().dot(mz);
}

double EquilibriumGap(const Game& g, const Strategy& z) {
  return EquilibriumGap(g.C(), z);
}

bool IsFixedPoint(const MatrixXd& m, const Strategy& x, double tol) {
  CheckSize(x.size(), m.cols());
  const VectorXd mx = m * x.vec();
  const double mean = x.vec().dot(mx);
  for (int i = 0; i < x.size(); ++i) {
    if (x.InCarrier(i) && std::abs(mx[i] - mean) > tol) return false;
  }
  return true;
}

}  // namespace mrd
