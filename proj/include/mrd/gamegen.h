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

#ifndef MRD_GAMEGEN_H_
#define MRD_GAMEGEN_H_

#include <cstdint>
#include <string>

#include "mrd/game.h"

namespace mrd {

enum class Distribution {
  // Entries i.i.d. uniform on [min_entry, 1].
  kUniform,
  // Circulant: C_ij = a_{(j - i) mod n} with a_k uniform on [min_entry, 1].
  // Every row sums to the same value, so the uniform strategy is an
  // equilibrium.
  kCyclic,
  // Diagonal uniform on [0.5, 1], off-diagonal uniform on [min_entry, 0.25].
  kCoordination,
};

// Parses "uniform", "cyclic" or "coordination"; throws ValidationError.
Distribution ParseDistribution(const std::string& name);
std::string DistributionName(Distribution d);

struct GenSpec {
  int n = 2;
  std::uint64_t seed = 0;
  double min_entry = 1e-3;
  double jitter = 1e-6;
  Distribution distribution = Distribution::kUniform;
};

inline constexpr int kMaxJitterAttempts = 100;

// Draws C from the distribution with a SplitMix64 stream seeded by
// spec.seed. While C fails CheckNonsingular, adds jitter * u_i to each
// diagonal entry (u_i uniform on [0, 1], jitter doubling per attempt) and
// renormalizes if an entry exceeds 1. Bit-identical for identical specs.
// Throws ValidationError for an invalid spec and Error after
// kMaxJitterAttempts failed attempts.
Game Generate(const GenSpec& spec);

// C = a * raw + b * ones with a > 0, mapping [min raw, max raw] onto
// [min_entry, 1]. When raw already lies in [min_entry, 1] the identity
// (a = 1, b = 0) is used. The game records (a, b) with kNormalized
// provenance. Throws ValidationError for constant or non-finite raw.
Game Normalize(const MatrixXd& raw, double min_entry);

}  // namespace mrd

#endif  // MRD_GAMEGEN_H_
