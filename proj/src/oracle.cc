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

#include "mrd/oracle.h"

#include <cmath>
#include <optional>

#include <spdlog/spdlog.h>

#include "mrd/math_core.h"

namespace mrd {
namespace {

constexpr double kClipTol = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr double kBestResponseTol = 1e-9;
constexpr double kDedupTol = 1e-8;

struct SupportSolution {
  VectorXd z;
  double value = 0.0;
};

std::vector<int> MaskIndices(unsigned mask, int n) {
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) idx.push_back(i);
  }
  return idx;
}

// Solves (M z)_i = v for i in T, sum_T z = 1, z = 0 off T. Returns nullopt
// for singular systems, residuals above kResidualTol or entries below
// -kClipTol; entries in [-kClipTol, 0) are set to 0.
std::optional<SupportSolution> SolveSupport(const MatrixXd& m,
                                            const std::vector<int>& support) {
  const int n = static_cast<int>(m.rows());
  const int k = static_cast<int>(support.size());
  MatrixXd a = MatrixXd::Zero(k + 1, k + 1);
  VectorXd rhs = VectorXd::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) a(r, c) = m(support[r], support[c]);
    a(r, k) = -1.0;
  }
  a.row(k).head(k).setOnes();
  rhs[k] = 1.0;
  Eigen::FullPivLU<MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    spdlog::debug("oracle: singular support system of size {}", k);
    return std::nullopt;
  }
  const VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite() ||
      (a * sol - rhs).cwiseAbs().maxCoeff() > kResidualTol) {
    spdlog::debug("oracle: support system residual check failed");
    return std::nullopt;
  }
  SupportSolution out;
  out.z = VectorXd::Zero(n);
  for (int c = 0; c < k; ++c) {
    if (sol[c] < -kClipTol) return std::nullopt;
    out.z[support[c]] = std::max(sol[c], 0.0);
  }
  out.z /= out.z.sum();
  out.value = sol[k];
  return out;
}

bool IsDuplicate(const std::vector<VectorXd>& seen, const VectorXd& z) {
  for (const VectorXd& s : seen) {
    if ((s - z).cwiseAbs().maxCoeff() <= kDedupTol) return true;
  }
  return false;
}

void CheckSize(int n, int n_max) {
  if (n > n_max) {
    throw DimensionError("support enumeration limited to n <= " +
                         std::to_string(n_max));
  }
}

}  // namespace

EquilibriumCertificate EquilibriumCertificate::Make(const Game& g,
                                                    const Strategy& z,
                                                    CertificateSource source) {
  EquilibriumCertificate cert;
  cert.z = z;
  cert.gap = EquilibriumGap(g, z);
  cert.support = z.Carrier();
  cert.source = source;
  return cert;
}

std::vector<EquilibriumCertificate> EnumerateSymmetricEquilibria(
    const Game& g, int n_max) {
  const int n = g.n();
  CheckSize(n, n_max);
  std::vector<EquilibriumCertificate> certs;
  std::vector<VectorXd> seen;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const auto sol = SolveSupport(g.C(), MaskIndices(mask, n));
    if (!sol) continue;
    const VectorXd cz = g.C() * sol->z;
    bool best_response = true;
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1u << j)) && cz[j] > sol->value + kBestResponseTol) {
        best_response = false;
        break;
      }
    }
    if (!best_response || IsDuplicate(seen, sol->z)) continue;
    EquilibriumCertificate cert = EquilibriumCertificate::Make(
        g, Strategy::FromWeights(sol->z), CertificateSource::kOracle);
    if (cert.gap > kCertTol) {
      spdlog::debug("oracle: candidate gap {} above certificate tolerance",
                    cert.gap);
      continue;
    }
    seen.push_back(sol->z);
    certs.push_back(std::move(cert));
  }
  return certs;
}

std::vector<Strategy> EnumerateFixedPoints(const MatrixXd& m, int n_max) {
  const int n = static_cast<int>(m.rows());
  CheckSize(n, n_max);
  std::vector<Strategy> points;
  std::vector<VectorXd> seen;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const auto sol = SolveSupport(m, MaskIndices(mask, n));
    if (!sol || IsDuplicate(seen, sol->z)) continue;
    seen.push_back(sol->z);
    points.push_back(Strategy::FromWeights(sol->z));
  }
  return points;
}

std::vector<Strategy> EnumerateSSFixedPoints(const Game& g, int n_max) {
  return EnumerateFixedPoints(g.S(), n_max);
}

bool VerifyEquilibrium(const Game& g, const Strategy& z, double eps) {
  if (eps < 0.0) throw ValidationError("eps must be nonnegative");
  return EquilibriumGap(g, z) <= eps;
}

int MatchEquilibrium(const std::vector<EquilibriumCertificate>& certs,
                     const Strategy& z, double tol) {
  for (size_t i = 0; i < certs.size(); ++i) {
    if (certs[i].z.size() != z.size()) continue;
    if ((certs[i].z.vec() - z.vec()).cwiseAbs().maxCoeff() <= tol) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace mrd
