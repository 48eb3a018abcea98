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

#ifndef MRD_MULTIPLIER_SOLVER_H_
#define MRD_MULTIPLIER_SOLVER_H_

#include <optional>
#include <vector>

#include "mrd/game.h"
#include "mrd/theta_solver.h"

// The multiplier program at a state x:
//
//   minimize   RE(z, x) + eps^2 / 2 + eta^2 / 2
//   subject to sum_i z_i B_i >= eps theta^2                    [budget]
//              (Cz)_r - x.Cz <= eps,            r = 1..n        [rows]
//              JensenGap(x, Cz, abar) <= eta^theta - 1          [jensen C]
//              JensenGap(x, Sz, abar) <= eta^theta - 1          [jensen S]
//              eta >= 1,  z in the simplex of carrier(x)
//
// where theta = theta_X comes from the theta solver and abar > 0 is fixed.
namespace mrd {

struct MultiplierConfig {
  int max_iterations = 100000;
  double feas_tol = 1e-7;
  double kkt_tol = 1e-6;
  double abar = 1.0;
};

// Nonnegative entries mean the constraint holds.
struct ConstraintSlacks {
  double s_budget = 0.0;
  VectorXd s_rows;
  double s_jensen_c = 0.0;
  double s_jensen_s = 0.0;
  // eta - 1.
  double s_eta = 0.0;

  double Min() const;
  bool Feasible(double tol) const { return Min() >= -tol; }
};

// Multipliers of the Lagrangian
//   f - lambda0 [budget] + sum_r lambda_r [rows]_r + kappa1 [jensen C]
//     + kappa2 [jensen S] + kappa3 (1 - eta),
// where each bracket is lhs - rhs (sum z B - eps theta^2 for the budget).
// All multipliers are nonnegative; those of constraints absent from the
// solved regime are 0.
struct MultiplierDuals {
  double lambda0 = 0.0;
  VectorXd lambda;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

enum class MultiplierRegime {
  // carrier(x) is a single index; z = x.
  kVertex,
  // theta > kThetaZero: all constraints active in the barrier solve.
  kRegular,
  // theta <= kThetaZero: the Jensen constraints force Cz and Sz constant on
  // carrier(x).
  kEquality,
  // Equality regime with no strictly positive z satisfying it.
  kEqualityInfeasible,
};

struct MultiplierStart {
  Strategy z = Strategy::Uniform(1);
  double eps = 1.0;
  double eta = 1.0;
};

struct MultiplierSolution {
  Strategy z = Strategy::Uniform(1);
  double eps = 0.0;
  double eta = 1.0;
  double kkt_residual = 0.0;
  ConstraintSlacks slacks;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  MultiplierRegime regime = MultiplierRegime::kRegular;
  MultiplierDuals duals;
  // Objective of FeasibleInit's point and after each barrier centering.
  double init_objective = 0.0;
  std::vector<double> outer_objectives;
};

// RE(z, x) + eps^2 / 2 + eta^2 / 2.
double MultiplierObjective(const Strategy& x, const Strategy& z, double eps,
                           double eta);

// Slacks of all constraints. For theta <= kThetaZero the right-hand side of
// the Jensen constraints is taken as 0.
ConstraintSlacks ConstraintValues(const Game& g, const Strategy& x,
                                  const ThetaSolution& theta,
                                  const Strategy& z, double eps, double eta,
                                  double abar);

// (Y_X, 1, eta0) with eta0 the smallest power of two making the Jensen
// constraints hold when theta > kThetaZero; otherwise (E_i*, 1, 1) with i*
// the heaviest coordinate of x.
MultiplierStart FeasibleInit(const Game& g, const Strategy& x,
                             const ThetaSolution& theta, double abar);

// Minimizes the program above. The barrier starts from `warm`.z or from a
// softmax reweighting of x, whichever strictly feasible start is cheaper, with
// eps and eta re-centered. Without any strictly feasible start the result is
// FeasibleInit, marked unconverged.
MultiplierSolution SolveMultiplier(const Game& g, const Strategy& x,
                                   const ThetaSolution& theta,
                                   const MultiplierConfig& config,
                                   const std::optional<MultiplierStart>& warm =
                                       std::nullopt);

// Lagrangian above evaluated at an arbitrary (not necessarily normalized)
// positive z. Used for finite-difference stationarity checks.
double MultiplierLagrangian(const Game& g, const Strategy& x,
                            const ThetaSolution& theta, double abar,
                            const VectorXd& z, double eps, double eta,
                            const MultiplierDuals& duals);

// Stationarity of the Lagrangian at (z, eps, eta): the z-part scaled by z_i
// after removing the simplex normal, in the max norm, together with the
// eps and eta partials. `grad` is the full gradient in (z, eps, eta).
double ScaledStationarity(const Strategy& z, const VectorXd& grad);

}  // namespace mrd

#endif  // MRD_MULTIPLIER_SOLVER_H_
