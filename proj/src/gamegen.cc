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

#include "mrd/gamegen.h"

#include <spdlog/spdlog.h>

#include "mrd/rng.h"

namespace mrd {
namespace {

MatrixXd Draw(const GenSpec& spec, SplitMix64& rng) {
  const int n = spec.n;
  MatrixXd c(n, n);
  switch (spec.distribution) {
    case Distribution::kUniform:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c(i, j) = rng.Uniform(spec.min_entry, 1.0);
      }
      break;
    case Distribution::kCyclic: {
      VectorXd a(n);
      for (int k = 0; k < n; ++k) a[k] = rng.Uniform(spec.min_entry, 1.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c(i, j) = a[(j - i + n) % n];
      }
      break;
    }
    case Distribution::kCoordination:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          c(i, j) = i == j ? rng.Uniform(0.5, 1.0)
                           : rng.Uniform(spec.min_entry, 0.25);
        }
      }
      break;
  }
  return c;
}

}  // namespace

Distribution ParseDistribution(const std::string& name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "cyclic") return Distribution::kCyclic;
  if (name == "coordination") return Distribution::kCoordination;
  throw ValidationError("unknown distribution: " + name);
}

std::string DistributionName(Distribution d) {
  switch (d) {
    case Distribution::kUniform:
      return "uniform";
    case Distribution::kCyclic:
      return "cyclic";
    case Distribution::kCoordination:
      return "coordination";
  }
  return "uniform";
}

Game Normalize(const MatrixXd& raw, double min_entry) {
  if (!(min_entry > 0.0 && min_entry < 1.0)) {
    throw ValidationError("min_entry must lie in (0, 1)");
  }
  if (raw.size() == 0 || !raw.allFinite()) {
    throw ValidationError("raw matrix must be nonempty and finite");
  }
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) {
    throw ValidationError("cannot normalize a constant matrix");
  }
  if (lo >= min_entry && hi <= 1.0) {
    return Game::FromMatrix(raw, Provenance::kNormalized, 1.0, 0.0);
  }
  const double a = (1.0 - min_entry) / (hi - lo);
  const double b = min_entry - a * lo;
  MatrixXd c = (a * raw.array() + b).matrix();
  // Guard the endpoints against rounding.
  c = c.cwiseMax(min_entry).cwiseMin(1.0);
  return Game::FromMatrix(std::move(c), Provenance::kNormalized, a, b);
}

Game Generate(const GenSpec& spec) {
  if (spec.n < 1) throw ValidationError("n must be at least 1");
  if (!(spec.min_entry > 0.0 && spec.min_entry < 1.0)) {
    throw ValidationError("min_entry must lie in (0, 1)");
  }
  if (!(spec.jitter > 0.0)) throw ValidationError("jitter must be positive");
  SplitMix64 rng(spec.seed);
  MatrixXd c = Draw(spec, rng);
  if (CheckNonsingular(c).invertible) return Game::FromMatrix(std::move(c));
  double jitter = spec.jitter;
  for (int attempt = 0; attempt < kMaxJitterAttempts; ++attempt) {
    for (int i = 0; i < spec.n; ++i) c(i, i) += jitter * rng.Uniform();
    Game g = c.maxCoeff() > 1.0 ? Normalize(c, spec.min_entry)
                                : Game::FromMatrix(c);
    if (g.invertible()) {
      spdlog::debug("gamegen: seed {} needed {} jitter attempts", spec.seed,
                    attempt + 1);
      return g;
    }
    c = g.C();
    jitter *= 2.0;
  }
  throw Error("generation failed: matrix still singular after jitter");
}

}  // namespace mrd
