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

#include "mrd/barrier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mrd::barrier {
namespace {

// Below this Newton decrement^2 the full step is taken without the Armijo
// test; the comparison would be dominated by rounding in phi.
constexpr double kPureNewtonDecrement = 1e-10;
constexpr int kMaxBacktracks = 80;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Fraction of the distance to zero a dual step may cover.
constexpr double kDualFraction = 0.99;
constexpr double kDualSpread = 1e6;

bool StrictlyFeasible(const Problem& problem, const VectorXd& p, VectorXd* g) {
  if (!p.allFinite() || !problem.InDomain(p)) return false;
  problem.Constraints(p, g);
  for (Eigen::Index k = 0; k < g->size(); ++k) {
    if (!((*g)[k] < 0.0)) return false;
  }
  return true;
}

double BarrierValue(const Problem& problem, const VectorXd& p,
                    const VectorXd& g, double mu) {
  double value = problem.Objective(p);
  for (Eigen::Index k = 0; k < g.size(); ++k) value -= mu * std::log(-g[k]);
  return value;
}

// Solves h q = rhs for symmetric h, adding a diagonal shift until the
// factorization is positive definite.
VectorXd SolvePositiveDefinite(MatrixXd h, const VectorXd& rhs) {
  const Eigen::Index dim = h.rows();
  if (dim == 0) return VectorXd();
  double shift = 0.0;
  const double scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int attempt = 0; attempt < 40; ++attempt) {
    MatrixXd shifted = h;
    shifted.diagonal().array() += shift;
    Eigen::LLT<MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      VectorXd q = llt.solve(rhs);
      if (q.allFinite()) return q;
    }
    shift = shift == 0.0 ? 1e-14 * scale : shift * 10.0;
  }
  return VectorXd::Zero(dim);
}

// Fits nonnegative multipliers for the constraints in `active` (and free
// ones for the equality rows) to the scaled stationarity conditions, dropping
// the most negative one until all are nonnegative.
VectorXd FitMultipliers(const VectorXd& scale, const VectorXd& grad_f,
                        const MatrixXd& jac, const MatrixXd& eq,
                        std::vector<int> active) {
  const Eigen::Index m = jac.rows();
  const VectorXd dg = scale.cwiseProduct(grad_f);
  while (!active.empty()) {
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    MatrixXd cols(scale.size(), na + eq.rows());
    for (Eigen::Index k = 0; k < na; ++k) {
      cols.col(k) = scale.cwiseProduct(jac.row(active[k]).transpose());
    }
    for (Eigen::Index r = 0; r < eq.rows(); ++r) {
      cols.col(na + r) = scale.cwiseProduct(eq.row(r).transpose());
    }
    const VectorXd sol = cols.completeOrthogonalDecomposition().solve(-dg);
    Eigen::Index worst = -1;
    for (Eigen::Index k = 0; k < na; ++k) {
      if (sol[k] < 0.0 && (worst < 0 || sol[k] < sol[worst])) worst = k;
    }
    if (worst < 0) {
      VectorXd lambda = VectorXd::Zero(m);
      for (Eigen::Index k = 0; k < na; ++k) lambda[active[k]] = sol[k];
      return lambda;
    }
    active.erase(active.begin() + worst);
  }
  return VectorXd::Zero(m);
}

}  // namespace

double ScaledStationarity(const VectorXd& scale, const VectorXd& grad_l,
                          const MatrixXd& eq) {
  const VectorXd dg = scale.cwiseProduct(grad_l);
  if (dg.size() == 0) return 0.0;
  if (eq.rows() == 0) return dg.cwiseAbs().maxCoeff();
  const MatrixXd dat = scale.asDiagonal() * eq.transpose();
  const VectorXd nu = dat.completeOrthogonalDecomposition().solve(dg);
  return (dg - dat * nu).cwiseAbs().maxCoeff();
}

KktEstimate EstimateKkt(const Problem& problem, const MatrixXd& eq,
                        const VectorXd& p, const VectorXd* central,
                        double active_slack) {
  const int m = problem.NumConstraints();
  VectorXd grad_f, g;
  MatrixXd hess, jac;
  problem.ObjectiveDerivatives(p, &grad_f, &hess);
  problem.ConstraintJacobian(p, &jac);
  problem.Constraints(p, &g);
  const VectorXd scale = problem.ResidualScale(p);

  const auto evaluate = [&](VectorXd lambda) {
    KktEstimate est;
    est.stationarity =
        ScaledStationarity(scale, grad_f + jac.transpose() * lambda, eq);
    est.complementarity =
        m > 0 ? lambda.cwiseProduct(g).cwiseAbs().maxCoeff() : 0.0;
    est.lambda = std::move(lambda);
    return est;
  };
  const auto worse = [](const KktEstimate& a, const KktEstimate& b) {
    return std::max(a.stationarity, a.complementarity) >
           std::max(b.stationarity, b.complementarity);
  };

  // Which near-active constraints belong in the fit is not known in
  // advance; try nested active sets and keep the best residual.
  KktEstimate best;
  bool have = false;
  std::vector<int> previous;
  for (double slack = active_slack * 1e-9; slack <= active_slack * 1.001;
       slack *= 10.0) {
    std::vector<int> active;
    for (int k = 0; k < m; ++k) {
      if (-g[k] <= slack) active.push_back(k);
    }
    if (have && active == previous) continue;
    previous = active;
    KktEstimate est = evaluate(FitMultipliers(scale, grad_f, jac, eq, active));
    if (!have || worse(best, est)) {
      best = std::move(est);
      have = true;
    }
  }
  if (central != nullptr) {
    KktEstimate est = evaluate(*central);
    if (worse(best, est)) best = std::move(est);
  }
  return best;
}

MatrixXd NullSpace(const MatrixXd& a) {
  const Eigen::Index dim = a.cols();
  if (a.rows() == 0) return MatrixXd::Identity(dim, dim);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-12 * std::max(top, 1.0)) ++rank;
  }
  return svd.matrixV().rightCols(dim - rank);
}

Result Minimize(const Problem& problem, const MatrixXd& eq,
                const VectorXd& p0, const Options& options) {
  const int dim = problem.Dim();
  const int m = problem.NumConstraints();
  const MatrixXd null = NullSpace(eq);

  Result result;
  result.p = p0;
  VectorXd g(m);
  if (!StrictlyFeasible(problem, result.p, &g)) {
    result.converged = false;
    result.objective = problem.Objective(p0);
    result.lambda = VectorXd::Zero(m);
    return result;
  }

  VectorXd grad_f(dim), grad_phi(dim), trial_g(m);
  MatrixXd hess(dim, dim), jac(m, dim);
  double mu = std::max(options.mu_initial, options.mu_final);
  bool last_center_ok = false;
  VectorXd lambda = mu * (-g).cwiseInverse();

  while (true) {
    last_center_ok = false;
    double prev_decrement2 = kInfinity;
    for (int step = 0; step < options.max_centering_steps; ++step) {
      if (result.newton_steps >= options.max_newton_steps) break;
      problem.ObjectiveDerivatives(result.p, &grad_f, &hess);
      problem.ConstraintJacobian(result.p, &jac);
      const VectorXd inv_slack = (-g).cwiseInverse();
      grad_phi = grad_f + mu * jac.transpose() * inv_slack;
      problem.AddConstraintHessian(result.p, lambda, &hess);
      hess.noalias() += jac.transpose() *
                        lambda.cwiseProduct(inv_slack).asDiagonal() * jac;

      const MatrixXd reduced = null.transpose() * hess * null;
      const VectorXd reduced_grad = null.transpose() * grad_phi;
      const VectorXd q = SolvePositiveDefinite(reduced, -reduced_grad);
      const VectorXd dp = null * q;
      const double decrement2 = -reduced_grad.dot(q);
      // Rounding in phi scales with its magnitude, so both tests are
      // relative to the objective.
      const double scale =
          std::max(1.0, std::abs(problem.Objective(result.p)));
      // Below kPureNewtonDecrement Newton converges quadratically, so a
      // decrement that stops shrinking means rounding noise dominates.
      const bool stalled = decrement2 < kPureNewtonDecrement * scale &&
                           decrement2 > 0.25 * prev_decrement2;
      prev_decrement2 = decrement2;
      if (!(decrement2 > 2.0 * options.centering_tol * scale) || stalled) {
        lambda = mu * inv_slack;
        last_center_ok = true;
        break;
      }
      const VectorXd jdp = jac * dp;
      const VectorXd dlambda =
          (lambda.cwiseProduct(jdp + g).array() + mu).matrix().cwiseProduct(
              inv_slack);

      const double phi = BarrierValue(problem, result.p, g, mu);
      double t = 1.0;
      VectorXd trial = result.p + dp;
      int backtracks = 0;
      while (!StrictlyFeasible(problem, trial, &trial_g) &&
             backtracks < kMaxBacktracks) {
        t *= options.backtrack;
        trial = result.p + t * dp;
        ++backtracks;
      }
      if (backtracks == kMaxBacktracks) break;
      if (decrement2 >= kPureNewtonDecrement * scale || t < 1.0) {
        while (BarrierValue(problem, trial, trial_g, mu) >
                   phi - options.armijo_c * t * decrement2 &&
               backtracks < kMaxBacktracks) {
          t *= options.backtrack;
          trial = result.p + t * dp;
          if (!StrictlyFeasible(problem, trial, &trial_g)) {
            backtracks = kMaxBacktracks;
            break;
          }
          ++backtracks;
        }
        if (backtracks == kMaxBacktracks) {
          // Rounding floor: the center is as good as double allows.
          last_center_ok = decrement2 < kPureNewtonDecrement * scale;
          break;
        }
      }
      double dual_step = t;
      for (int k = 0; k < m; ++k) {
        if (dlambda[k] < 0.0) {
          dual_step =
              std::min(dual_step, -kDualFraction * lambda[k] / dlambda[k]);
        }
      }
      result.p = trial;
      g = trial_g;
      lambda += dual_step * dlambda;
      // Keep each dual within a fixed factor of its barrier value mu / -g.
      for (int k = 0; k < m; ++k) {
        const double central = mu / -g[k];
        lambda[k] = std::clamp(lambda[k], central / kDualSpread,
                               central * kDualSpread);
      }
      ++result.newton_steps;
    }
    result.outer_objectives.push_back(problem.Objective(result.p));
    if (!last_center_ok || mu <= options.mu_final) break;
    mu = std::max(mu / options.mu_factor, options.mu_final);
  }

  result.mu = mu;
  result.objective = problem.Objective(result.p);
  result.converged = last_center_ok && mu <= options.mu_final;

  // mu / -g_k loses all relative accuracy once -g_k reaches rounding level,
  // so the estimate also refits the near-active multipliers directly.
  const VectorXd central = mu * (-g).cwiseInverse();
  KktEstimate kkt =
      EstimateKkt(problem, eq, result.p, &central, options.active_slack);
  result.lambda = std::move(kkt.lambda);
  result.stationarity = kkt.stationarity;
  result.complementarity = kkt.complementarity;
  return result;
}

}  // namespace mrd::barrier
