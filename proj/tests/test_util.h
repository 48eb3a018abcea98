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

#ifndef MRD_TESTS_TEST_UTIL_H_
#define MRD_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mrd/game.h"
#include "mrd/rng.h"

// Generators and brute-force reference solvers shared by the unit and
// acceptance tests. The reference solvers only use direct formulas and grids;
// they do not call into the library beyond the Game/Strategy containers.
namespace mrd::testing {

inline MatrixXd RandomPayoffs(int n, SplitMix64& rng, double lo = 1e-3) {
  MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = rng.Uniform(lo, 1.0);
  }
  return c;
}

// Redraws until the matrix passes the invertibility check.
inline Game RandomGame(int n, SplitMix64& rng) {
  while (true) {
    Game g = Game::FromMatrix(RandomPayoffs(n, rng));
    if (g.invertible()) return g;
  }
}

// Interior point with every coordinate at least `floor` before
// normalization.
inline Strategy RandomInteriorPoint(int n, SplitMix64& rng,
                                    double floor = 1e-3) {
  VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = floor + rng.Uniform();
  return Strategy::FromWeights(w);
}

inline double PlainDot(const VectorXd& a, const VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// sum_i z_i log(z_i / x_i) with 0 log 0 = 0.
inline double PlainEntropy(const VectorXd& z, const VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) s += z[i] * std::log(z[i] / x[i]);
  }
  return s;
}

// The B vector from its definition, written out with explicit loops.
inline VectorXd PlainB(const MatrixXd& c, const VectorXd& x) {
  const int n = static_cast<int>(c.rows());
  VectorXd ctx = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) ctx[i] += c(j, i) * x[j];
  }
  VectorXd sx = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) sx[i] += c(i, k) * ctx[k];
  }
  const double xsx = PlainDot(x, sx);
  VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += c(j, i) * x[j] * sx[j];
    b[i] = s / xsx - ctx[i];
  }
  return b;
}

// log(sum_i x_i exp(a v_i)) - a x.v over x_i > 0, by direct summation.
inline double PlainJensen(const VectorXd& x, const VectorXd& v, double a) {
  double mean = 0.0, top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) continue;
    mean += x[i] * v[i];
    top = std::max(top, v[i]);
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) s += x[i] * std::exp(a * (v[i] - top));
  }
  return std::log(s) + a * top - a * mean;
}

inline double PlainGap(const MatrixXd& c, const VectorXd& z) {
  const VectorXd cz = c * z;
  return cz.maxCoeff() - PlainDot(z, cz);
}

// Value of  min RE(y, x) - t  s.t.  y.B >= t^2  for fixed y: the best t is
// sqrt(y.B), and no t is feasible when y.B < 0.
inline double ThetaProfile(const VectorXd& y, const VectorXd& x,
                           const VectorXd& b) {
  const double yb = PlainDot(y, b);
  if (yb < 0.0) return std::numeric_limits<double>::infinity();
  return PlainEntropy(y, x) - std::sqrt(yb);
}

// Grid minimum of ThetaProfile over the simplex, n in {2, 3}: a 1e-2 grid,
// then grids of step 1e-4, 1e-6 and 1e-8 on boxes of half-width 200 steps
// around the best point so far, re-centered until the best point stays
// inside the inner half of the box. The finer levels resolve optima that sit
// near y.B = 0, where sqrt(y.B) is steep.
inline double ThetaPrimalOracle(const VectorXd& x, const VectorXd& b) {
  const int n = static_cast<int>(x.size());
  double best = std::numeric_limits<double>::infinity();
  VectorXd arg(n);
  VectorXd y(n);
  const auto scan = [&](double lo0, double hi0, double lo1, double hi1,
                        double step) {
    const int k0 = static_cast<int>(std::round((hi0 - lo0) / step));
    const int k1 = n == 3 ? static_cast<int>(std::round((hi1 - lo1) / step))
                          : 0;
    for (int i = 0; i <= k0; ++i) {
      const double a = lo0 + i * step;
      if (a < 0.0 || a > 1.0) continue;
      for (int j = 0; j <= k1; ++j) {
        if (n == 2) {
          y << a, 1.0 - a;
        } else {
          const double c = lo1 + j * step;
          if (c < 0.0 || a + c > 1.0) continue;
          y << a, c, std::max(0.0, 1.0 - a - c);
        }
        const double v = ThetaProfile(y, x, b);
        if (v < best) {
          best = v;
          arg = y;
        }
      }
    }
  };
  scan(0.0, 1.0, 0.0, 1.0, 1e-2);
  for (double step : {1e-4, 1e-6, 1e-8}) {
    const double w = 200.0 * step;
    // Re-center while the best point keeps landing near the box edge.
    for (int rep = 0; rep < 100; ++rep) {
      const VectorXd center = arg;
      scan(center[0] - w, center[0] + w, n == 3 ? center[1] - w : 0.0,
           n == 3 ? center[1] + w : 0.0, step);
      if ((arg - center).cwiseAbs().maxCoeff() < 0.5 * w) break;
    }
  }
  return best;
}

struct MultiplierOracleResult {
  double objective = std::numeric_limits<double>::infinity();
  double p = 0.0;
  double eps = 0.0;
  double eta = 1.0;
  bool feasible = false;
};

// Brute force for 2x2 games with interior x and theta > 0. For fixed
// z = (p, 1 - p) the optimal eps is the smallest admissible value
// L = (Cz)_max - x.Cz, feasible iff L theta^2 <= z.B, and the optimal eta is
// (1 + J)^(1 / theta) with J the larger of the two Jensen gaps. p runs over
// a 1e-5 grid of (0, 1).
inline MultiplierOracleResult MultiplierGridOracle(const MatrixXd& c,
                                                   const VectorXd& x,
                                                   double theta, double abar) {
  const MatrixXd s = c * c.transpose();
  const VectorXd b = PlainB(c, x);
  MultiplierOracleResult out;
  VectorXd z(2);
  const int steps = 100000;
  for (int k = 1; k < steps; ++k) {
    const double p = static_cast<double>(k) / steps;
    z << p, 1.0 - p;
    const VectorXd cz = c * z;
    const double lower = cz.maxCoeff() - PlainDot(x, cz);
    if (lower * theta * theta > PlainDot(z, b)) continue;
    const double jensen = std::max(PlainJensen(x, cz, abar),
                                   PlainJensen(x, VectorXd(s * z), abar));
    const double eta =
        std::max(1.0, std::exp(std::log1p(std::max(0.0, jensen)) / theta));
    const double value =
        PlainEntropy(z, x) + 0.5 * lower * lower + 0.5 * eta * eta;
    if (value < out.objective) {
      out.objective = value;
      out.p = p;
      out.eps = lower;
      out.eta = eta;
      out.feasible = true;
    }
  }
  return out;
}

}  // namespace mrd::testing

#endif  // MRD_TESTS_TEST_UTIL_H_
