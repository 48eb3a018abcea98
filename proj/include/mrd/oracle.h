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

#ifndef MRD_ORACLE_H_
#define MRD_ORACLE_H_

#include <vector>

#include "mrd/game.h"

// Exhaustive support enumeration for small symmetric games. Independent of
// the dynamics; used as ground truth.
namespace mrd {

inline constexpr int kOracleMaxN = 10;
inline constexpr double kCertTol = 1e-9;

enum class CertificateSource { kOracle, kDynamics };

struct EquilibriumCertificate {
  Strategy z = Strategy::Uniform(1);
  // EquilibriumGap(g, z), recomputed by Make.
  double gap = 0.0;
  std::vector<int> support;
  CertificateSource source = CertificateSource::kOracle;

  static EquilibriumCertificate Make(const Game& g, const Strategy& z,
                                     CertificateSource source);
};

// All symmetric equilibria with a nonsingular indifference system on their
// support: for each support T, (Cz)_i = v on T, sum z = 1, z = 0 off T,
// z >= 0 and (Cz)_j <= v + 1e-9 off T. Duplicates within 1e-8 (max norm)
// are merged. Throws DimensionError if n > n_max.
std::vector<EquilibriumCertificate> EnumerateSymmetricEquilibria(
    const Game& g, int n_max = kOracleMaxN);

// Fixed points of (S, S): per support T, (Sz)_i = w on T, sum z = 1,
// z >= 0; no best-response condition.
std::vector<Strategy> EnumerateSSFixedPoints(const Game& g,
                                             int n_max = kOracleMaxN);

// Fixed points of (M, M) over all supports, as above.
std::vector<Strategy> EnumerateFixedPoints(const MatrixXd& m,
                                           int n_max = kOracleMaxN);

// EquilibriumGap(g, z) <= eps.
bool VerifyEquilibrium(const Game& g, const Strategy& z, double eps);

// Index of the certificate within `tol` (max norm) of z, or -1.
int MatchEquilibrium(const std::vector<EquilibriumCertificate>& certs,
                     const Strategy& z, double tol);

}  // namespace mrd

#endif  // MRD_ORACLE_H_
