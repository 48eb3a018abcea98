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

#ifndef MRD_BARRIER_H_
#define MRD_BARRIER_H_

#include <vector>

#include <Eigen/Dense>

// Log-barrier interior point method for small dense problems
//
//   minimize f(p)  s.t.  g_k(p) <= 0,  A p = b
//
// started from a strictly feasible point. Each centering step minimizes
// phi = f - mu sum_k ln(-g_k) on the null space of A by damped primal-dual
// Newton: the Hessian carries dual estimates lambda_k in place of mu / -g_k,
// and Armijo backtracking on phi keeps every iterate strictly feasible.
namespace mrd::barrier {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Problem {
 public:
  virtual ~Problem() = default;

  virtual int Dim() const = 0;
  virtual int NumConstraints() const = 0;

  // Domain of f (e.g. positive probabilities).
  virtual bool InDomain(const VectorXd& p) const = 0;

  virtual double Objective(const VectorXd& p) const = 0;
  virtual void ObjectiveDerivatives(const VectorXd& p, VectorXd* grad,
                                    MatrixXd* hess) const = 0;

  virtual void Constraints(const VectorXd& p, VectorXd* g) const = 0;
  // Row k of `jac` is grad g_k.
  virtual void ConstraintJacobian(const VectorXd& p, MatrixXd* jac) const = 0;
  // hess += sum_k weights_k * Hess g_k.
  virtual void AddConstraintHessian(const VectorXd& p, const VectorXd& weights,
                                    MatrixXd* hess) const = 0;

  // Per-coordinate scale for the stationarity residual (e.g. z_i for
  // probability coordinates).
  virtual VectorXd ResidualScale(const VectorXd& p) const {
    return VectorXd::Ones(p.size());
  }
};

struct Options {
  double mu_initial = 1e-2;
  double mu_final = 1e-12;
  double mu_factor = 50.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  // Newton decrement^2 / 2 threshold ending a centering step.
  double centering_tol = 1e-16;
  int max_centering_steps = 2000;
  int max_newton_steps = 100000;
  // Constraints with -g_k below this enter the least-squares multiplier
  // estimate.
  double active_slack = 1e-3;
};

struct Result {
  VectorXd p;
  // Nonnegative least-squares multipliers over the near-active constraints,
  // or mu / -g_k when that fits the stationarity conditions better.
  VectorXd lambda;
  // Scaled stationarity max-norm of grad f + J^T lambda off the range of A^T.
  double stationarity = 0.0;
  // max_k lambda_k |g_k|.
  double complementarity = 0.0;
  double objective = 0.0;
  double mu = 0.0;
  int newton_steps = 0;
  bool converged = false;
  // f at the end of each centering step.
  std::vector<double> outer_objectives;
};

// Orthonormal basis of {d : A d = 0}; A may be rank deficient or empty.
MatrixXd NullSpace(const MatrixXd& a);

// Scaled stationarity residual of grad_l (the Lagrangian gradient) after
// removing the best combination of equality normals.
double ScaledStationarity(const VectorXd& scale, const VectorXd& grad_l,
                          const MatrixXd& eq);

struct KktEstimate {
  VectorXd lambda;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

// Multiplier estimate at p: nonnegative least-squares fits over the
// constraints with -g_k <= s for s = active_slack * 10^-9 .. active_slack,
// and `central` (mu / -g) when given. Returns the candidate with the smallest
// max(stationarity, complementarity).
KktEstimate EstimateKkt(const Problem& problem, const MatrixXd& eq,
                        const VectorXd& p, const VectorXd* central,
                        double active_slack);

// `p0` must satisfy A p0 = b, lie in the domain and have g(p0) < 0.
// `eq` holds A (rows may be redundant; zero rows for no equalities).
Result Minimize(const Problem& problem, const MatrixXd& eq,
                const VectorXd& p0, const Options& options);

}  // namespace mrd::barrier

#endif  // MRD_BARRIER_H_
