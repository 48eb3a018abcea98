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

#ifndef MRD_GAME_H_
#define MRD_GAME_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mrd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Coordinates at or below this value are outside the carrier.
inline constexpr double kCarrierTol = 1e-12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid payoff matrix or strategy (range, shape, singularity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// x.Sx <= 0 and similar breakdowns of the game algebra.
class DegenerateGameError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// A point of the probability simplex. Entries are nonnegative and sum to one
// within 1e-12; the carrier is {i : x_i > kCarrierTol}.
class Strategy {
 public:
  // Renormalizes `weights`. Negative entries in [-1e-12, 0) are clipped to 0;
  // anything more negative, non-finite, or a zero total throws ValidationError.
  static Strategy FromWeights(VectorXd weights);
  static Strategy Pure(int n, int i);
  static Strategy Uniform(int n);

  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[i]; }
  const VectorXd& vec() const { return x_; }

  bool InCarrier(int i) const { return x_[i] > kCarrierTol; }
  std::vector<int> Carrier() const;
  int CarrierSize() const;

  // Copy with off-carrier coordinates set to zero and the rest renormalized.
  Strategy OnCarrier() const;

 private:
  explicit Strategy(VectorXd x) : x_(std::move(x)) {}
  VectorXd x_;
};

enum class Provenance { kRaw, kNormalized };

struct NonsingularityReport {
  bool invertible = false;
  double determinant = 0.0;
  double rcond = 0.0;
};

// |det| from a pivoted LU below 1e-10 * scale^n, or reciprocal condition
// estimate below 1e-12, is reported as singular. scale = max |m_ij|.
NonsingularityReport CheckNonsingular(const MatrixXd& m);

// Symmetric bimatrix game (C, C^T) with 0 < C <= 1 and S = C C^T.
// Singular C is representable; invertible() reports the check above.
class Game {
 public:
  // Throws ValidationError unless `c` is square, nonempty and 0 < c_ij <= 1.
  static Game FromMatrix(MatrixXd c, Provenance provenance = Provenance::kRaw,
                         double scale = 1.0, double shift = 0.0);

  int n() const { return static_cast<int>(c_.rows()); }
  const MatrixXd& C() const { return c_; }
  const MatrixXd& S() const { return s_; }
  bool invertible() const { return report_.invertible; }
  double cond_estimate() const { return report_.rcond; }
  double determinant() const { return report_.determinant; }

  Provenance provenance() const { return provenance_; }
  // Affine map C = scale * raw + shift * ones when provenance is kNormalized.
  double scale() const { return scale_; }
  double shift() const { return shift_; }

 private:
  Game() = default;
  MatrixXd c_;
  MatrixXd s_;
  NonsingularityReport report_;
  Provenance provenance_ = Provenance::kRaw;
  double scale_ = 1.0;
  double shift_ = 0.0;
};

}  // namespace mrd

#endif  // MRD_GAME_H_
