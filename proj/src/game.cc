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

#include "mrd/game.h"

#include <cmath>
#include <string>

namespace mrd {

Strategy Strategy::FromWeights(VectorXd weights) {
  if (weights.size() == 0) throw ValidationError("empty strategy");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      throw ValidationError("non-finite strategy entry");
    }
    if (weights[i] < 0.0) {
      if (weights[i] < -1e-12) {
        throw ValidationError("negative strategy entry at index " +
                              std::to_string(i));
      }
      weights[i] = 0.0;
    }
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw ValidationError("strategy has zero total mass");
  weights /= total;
  return Strategy(std::move(weights));
}

Strategy Strategy::Pure(int n, int i) {
  if (i < 0 || i >= n) throw DimensionError("pure strategy index out of range");
  VectorXd x = VectorXd::Zero(n);
  x[i] = 1.0;
  return Strategy(std::move(x));
}

Strategy Strategy::Uniform(int n) {
  if (n <= 0) throw DimensionError("uniform strategy needs n >= 1");
  return Strategy(VectorXd::Constant(n, 1.0 / n));
}

std::vector<int> Strategy::Carrier() const {
  std::vector<int> carrier;
  for (int i = 0; i < size(); ++i) {
    if (InCarrier(i)) carrier.push_back(i);
  }
  return carrier;
}

int Strategy::CarrierSize() const {
  int count = 0;
  for (int i = 0; i < size(); ++i) count += InCarrier(i) ? 1 : 0;
  return count;
}

Strategy Strategy::OnCarrier() const {
  VectorXd y = x_;
  for (int i = 0; i < size(); ++i) {
    if (!InCarrier(i)) y[i] = 0.0;
  }
  y /= y.sum();
  return Strategy(std::move(y));
}

NonsingularityReport CheckNonsingular(const MatrixXd& m) {
  NonsingularityReport report;
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != n) return report;
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return report;
  Eigen::PartialPivLU<MatrixXd> lu(m);
  report.determinant = lu.determinant();
  report.rcond = lu.rcond();
  const double det_floor = 1e-10 * std::pow(scale, n);
  report.invertible = std::abs(report.determinant) >= det_floor &&
                      report.rcond >= 1e-12 && std::isfinite(report.rcond);
  return report;
}

Game Game::FromMatrix(MatrixXd c, Provenance provenance, double scale,
                      double shift) {
  if (c.rows() == 0 || c.rows() != c.cols()) {
    throw ValidationError("payoff matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const double v = c(i, j);
      if (!(v > 0.0 && v <= 1.0)) {
        throw ValidationError("payoff entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) +
                              ") outside (0, 1]: " + std::to_string(v));
      }
    }
  }
  Game g;
  g.s_ = c * c.transpose();
  g.report_ = CheckNonsingular(c);
  g.c_ = std::move(c);
  g.provenance_ = provenance;
  g.scale_ = scale;
  g.shift_ = shift;
  return g;
}

}  // namespace mrd
