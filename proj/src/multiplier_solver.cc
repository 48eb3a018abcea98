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

#include "mrd/multiplier_solver.h"

#include <algorithm>
#include <cmath>

#include "mrd/barrier.h"
#include "mrd/math_core.h"

namespace mrd {
namespace {

// Largest log eta accepted for a barrier start; eta^2 stays finite.
constexpr double kMaxStartLogEta = 350.0;

double RightHandSide(const ThetaSolution& theta, double eta) {
  return theta.theta > kThetaZero ? std::expm1(theta.theta * std::log(eta))
                                  : 0.0;
}

// (Cz)_max - x.Cz, the least eps allowed by the row constraints.
double EpsLowerBound(const MatrixXd& c, const Strategy& x, const VectorXd& z) {
  const VectorXd cz = c * z;
  return cz.maxCoeff() - x.vec().dot(cz);
}

// Jensen gap of v under carrier weights w (zero off-carrier, sum one), its
// softmax weights pi and, when requested, pi - w without cancellation.
double JensenParts(const VectorXd& v, const VectorXd& w, double abar,
                   VectorXd* pi, VectorXd* shift = nullptr) {
  const double mean = w.dot(v);
  double sum = 0.0;
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (w[r] != 0.0) sum += w[r] * ExpM1MinusLinear(abar * (v[r] - mean));
  }
  pi->setZero(v.size());
  if (shift != nullptr) shift->setZero(v.size());
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (w[r] == 0.0) continue;
    const double e = std::expm1(abar * (v[r] - mean));
    (*pi)[r] = w[r] * (e + 1.0) / (1.0 + sum);
    if (shift != nullptr) (*shift)[r] = w[r] * (e - sum) / (1.0 + sum);
  }
  return std::log1p(sum);
}

// The program in coordinates p = (z_K, eps[, u]) over carrier K, with
// eta = exp(u). Near a face theta is tiny and the optimal eta spans many
// orders of magnitude; Newton steps in eta itself crawl there.
class MultiplierProblem : public barrier::Problem {
 public:
  MultiplierProblem(const Game& g, const Strategy& xc, const VectorXd& b,
                    double theta, double abar, bool equality_regime)
      : n_(g.n()),
        carrier_(xc.Carrier()),
        m_(static_cast<int>(carrier_.size())),
        theta_(theta),
        abar_(abar),
        equality_(equality_regime),
        w_(xc.vec()) {
    ck_.resize(n_, m_);
    sk_.resize(n_, m_);
    xk_.resize(m_);
    bk_.resize(m_);
    for (int j = 0; j < m_; ++j) {
      ck_.col(j) = g.C().col(carrier_[j]);
      sk_.col(j) = g.S().col(carrier_[j]);
      xk_[j] = xc[carrier_[j]];
      bk_[j] = b[carrier_[j]];
    }
    xc_row_ = ck_.transpose() * w_;
  }

  int Dim() const override { return m_ + (equality_ ? 1 : 2); }
  int NumConstraints() const override { return equality_ ? n_ : n_ + 4; }
  int carrier_size() const { return m_; }
  const std::vector<int>& carrier() const { return carrier_; }
  const MatrixXd& ck() const { return ck_; }
  const MatrixXd& sk() const { return sk_; }
  const VectorXd& xk() const { return xk_; }

  VectorXd ResidualScale(const VectorXd& p) const override {
    VectorXd d = VectorXd::Ones(p.size());
    d.head(m_) = p.head(m_);
    // Report the eta component as d/d eta.
    if (!equality_) d[m_ + 1] = std::exp(-std::max(p[m_ + 1], 0.0));
    return d;
  }

  bool InDomain(const VectorXd& p) const override {
    for (int j = 0; j < m_; ++j) {
      if (!(p[j] > 0.0)) return false;
    }
    return equality_ || std::isfinite(p[m_ + 1]);
  }

  double Objective(const VectorXd& p) const override {
    double value = 0.0;
    for (int j = 0; j < m_; ++j) value += p[j] * std::log(p[j] / xk_[j]);
    value += 0.5 * p[m_] * p[m_];
    value += equality_ ? 0.5 : 0.5 * std::exp(2.0 * p[m_ + 1]);
    return value;
  }

  void ObjectiveDerivatives(const VectorXd& p, VectorXd* grad,
                            MatrixXd* hess) const override {
    grad->resize(Dim());
    hess->setZero(Dim(), Dim());
    for (int j = 0; j < m_; ++j) {
      (*grad)[j] = 1.0 + std::log(p[j] / xk_[j]);
      (*hess)(j, j) = 1.0 / p[j];
    }
    (*grad)[m_] = p[m_];
    (*hess)(m_, m_) = 1.0;
    if (!equality_) {
      const double eta2 = std::exp(2.0 * p[m_ + 1]);
      (*grad)[m_ + 1] = eta2;
      (*hess)(m_ + 1, m_ + 1) = 2.0 * eta2;
    }
  }

  void Constraints(const VectorXd& p, VectorXd* g) const override {
    const auto z = p.head(m_);
    const double eps = p[m_];
    g->resize(NumConstraints());
    const VectorXd cz = ck_ * z;
    const double mean = xc_row_.dot(z);
    const int offset = equality_ ? 0 : 1;
    for (int r = 0; r < n_; ++r) (*g)[offset + r] = cz[r] - mean - eps;
    if (equality_) return;
    const double u = p[m_ + 1];
    const double rhs = std::expm1(theta_ * u);
    VectorXd pi;
    (*g)[0] = eps * theta_ * theta_ - bk_.dot(z);
    (*g)[n_ + 1] = JensenParts(cz, w_, abar_, &pi) - rhs;
    (*g)[n_ + 2] = JensenParts(sk_ * z, w_, abar_, &pi) - rhs;
    (*g)[n_ + 3] = -u;
  }

  void ConstraintJacobian(const VectorXd& p, MatrixXd* jac) const override {
    jac->setZero(NumConstraints(), Dim());
    const int offset = equality_ ? 0 : 1;
    for (int r = 0; r < n_; ++r) {
      jac->row(offset + r).head(m_) = ck_.row(r) - xc_row_.transpose();
      (*jac)(offset + r, m_) = -1.0;
    }
    if (equality_) return;
    const auto z = p.head(m_);
    const double deta = -theta_ * std::exp(theta_ * p[m_ + 1]);
    jac->row(0).head(m_) = -bk_.transpose();
    (*jac)(0, m_) = theta_ * theta_;
    VectorXd pi, shift;
    JensenParts(ck_ * z, w_, abar_, &pi, &shift);
    jac->row(n_ + 1).head(m_) = abar_ * (ck_.transpose() * shift).transpose();
    (*jac)(n_ + 1, m_ + 1) = deta;
    JensenParts(sk_ * z, w_, abar_, &pi, &shift);
    jac->row(n_ + 2).head(m_) = abar_ * (sk_.transpose() * shift).transpose();
    (*jac)(n_ + 2, m_ + 1) = deta;
    (*jac)(n_ + 3, m_ + 1) = -1.0;
  }

  void AddConstraintHessian(const VectorXd& p, const VectorXd& weights,
                            MatrixXd* hess) const override {
    if (equality_) return;
    const auto z = p.head(m_);
    AddLseHessian(ck_, ck_ * z, weights[n_ + 1], hess);
    AddLseHessian(sk_, sk_ * z, weights[n_ + 2], hess);
    // The u-u term -theta^2 exp(theta u) is concave and left out so the
    // Newton matrix stays positive definite.
  }

 private:
  // weight * abar^2 M^T (diag(pi) - pi pi^T) M.
  void AddLseHessian(const MatrixXd& mk, const VectorXd& v, double weight,
                     MatrixXd* hess) const {
    VectorXd pi;
    JensenParts(v, w_, abar_, &pi);
    const VectorXd mean_row = mk.transpose() * pi;
    MatrixXd centered = mk;
    for (int r = 0; r < n_; ++r) centered.row(r) -= mean_row.transpose();
    hess->topLeftCorner(m_, m_).noalias() +=
        weight * abar_ * abar_ * centered.transpose() * pi.asDiagonal() *
        centered;
  }

  int n_;
  std::vector<int> carrier_;
  int m_;
  double theta_;
  double abar_;
  bool equality_;
  VectorXd w_;
  MatrixXd ck_, sk_;
  VectorXd xk_, bk_, xc_row_;
};

VectorXd Embed(const MultiplierProblem& problem, int n, const VectorXd& p) {
  VectorXd z = VectorXd::Zero(n);
  for (int j = 0; j < problem.carrier_size(); ++j) {
    z[problem.carrier()[j]] = p[j];
  }
  return z;
}

// With z fixed the optimal eps is the lower bound from the rows; the barrier leaves
// it O(sqrt(mu)) above that when the bound is degenerate. Moves eps there when
// feasible and re-estimates the multipliers at the moved point.
struct Polished {
  VectorXd p;
  barrier::KktEstimate kkt;
};

Polished SnapEps(const MultiplierProblem& problem, const MatrixXd& eq,
                 const Game& g, const Strategy& xc,
                 const barrier::Result& result) {
  const int m = problem.carrier_size();
  Polished out{result.p, {result.lambda, result.stationarity,
                          result.complementarity}};
  if (!result.converged) return out;
  VectorXd moved = result.p;
  moved[m] = EpsLowerBound(g.C(), xc, Embed(problem, g.n(), moved));
  if (!(moved[m] < result.p[m])) return out;
  VectorXd gval;
  problem.Constraints(moved, &gval);
  if (gval.maxCoeff() > 1e-15) return out;
  barrier::KktEstimate kkt =
      barrier::EstimateKkt(problem, eq, moved, nullptr, 1e-3);
  if (std::max(kkt.stationarity, kkt.complementarity) >
      std::max(out.kkt.stationarity, out.kkt.complementarity)) {
    return out;
  }
  out.p = std::move(moved);
  out.kkt = std::move(kkt);
  return out;
}

double MaxJensenGap(const Game& g, const Strategy& x, const Strategy& z,
                    double abar) {
  return std::max(JensenGap(x, g.C(), z, abar), JensenGap(x, g.S(), z, abar));
}

// Smallest eta in {from, 2 from, 4 from, ...} with eta^theta - 1 >= target,
// or a value above `cap` when none exists below it.
double DoubleEtaUntil(double from, double theta, double target, double cap,
                      bool strict) {
  double eta = from;
  while (eta <= cap) {
    const double rhs = std::expm1(theta * std::log(eta));
    if (strict ? rhs > target : rhs >= target) return eta;
    eta *= 2.0;
  }
  return eta;
}

std::optional<VectorXd> StrictRegularStart(
    const Game& g, const Strategy& xc, const VectorXd& b,
    const ThetaSolution& theta, double abar, const MultiplierProblem& problem,
    const std::optional<MultiplierStart>& warm) {
  const double th2 = theta.theta * theta.theta;
  auto try_point = [&](const Strategy& z) -> std::optional<VectorXd> {
    const int m = problem.carrier_size();
    VectorXd p(m + 2);
    for (int j = 0; j < m; ++j) {
      p[j] = z[problem.carrier()[j]];
      if (!(p[j] > 0.0)) return std::nullopt;
    }
    const double lower = EpsLowerBound(g.C(), xc, z.vec());
    const double upper = b.dot(z.vec()) / th2;
    if (!(upper - lower > 1e-12 * std::max(1.0, std::abs(upper)))) {
      return std::nullopt;
    }
    p[m] = lower + 0.5 * (upper - lower);
    // eta^theta - 1 = 2 J leaves the Jensen constraints a slack of order J rather than
    // whatever a coarse search lands on; a start near the boundary makes
    // the first centering crawl along it.
    const double jensen = MaxJensenGap(g, xc, z, abar);
    p[m + 1] = std::max(std::log(2.0),
                        std::log1p(2.0 * jensen + 1e-12) / theta.theta);
    if (!(p[m + 1] <= kMaxStartLogEta)) return std::nullopt;
    VectorXd gval;
    problem.Constraints(p, &gval);
    if ((gval.array() < 0.0).all() && problem.InDomain(p)) return p;
    return std::nullopt;
  };

  std::optional<VectorXd> from_warm;
  if (warm && warm->z.size() == xc.size()) {
    VectorXd zw = warm->z.vec();
    bool ok = true;
    for (int i = 0; i < xc.size(); ++i) {
      if (!xc.InCarrier(i)) {
        zw[i] = 0.0;
      } else if (!(zw[i] > 0.0)) {
        ok = false;
      }
    }
    if (ok) from_warm = try_point(Strategy::FromWeights(zw));
  }
  std::optional<VectorXd> from_dual;
  double a = theta.alpha;
  for (int k = 0; k < 40 && !from_dual; ++k, a *= 2.0) {
    from_dual = try_point(k == 0 ? theta.y : SoftmaxReweight(xc, b, a));
  }
  // A warm point can sit far out along eta (when theta is tiny the start eta
  // grows like exp(J / theta)); keep whichever start is cheaper.
  if (from_warm && from_dual) {
    return problem.Objective(*from_warm) <= problem.Objective(*from_dual)
               ? from_warm
               : from_dual;
  }
  return from_warm ? from_warm : from_dual;
}

MultiplierSolution Finish(const Game& g, const Strategy& x,
                          const ThetaSolution& theta,
                          const MultiplierConfig& config, MultiplierSolution sol) {
  sol.slacks = ConstraintValues(g, x, theta, sol.z, sol.eps, sol.eta,
                                config.abar);
  sol.objective = MultiplierObjective(x, sol.z, sol.eps, sol.eta);
  return sol;
}

MultiplierSolution VertexSolution(const Game& g, const Strategy& xc,
                                  const ThetaSolution& theta,
                                  const MultiplierConfig& config) {
  MultiplierSolution sol;
  sol.regime = MultiplierRegime::kVertex;
  sol.z = xc;
  sol.eps = EpsLowerBound(g.C(), xc, xc.vec());
  sol.eta = 1.0;
  sol.duals.lambda = VectorXd::Zero(g.n());
  sol.converged = true;
  sol = Finish(g, xc, theta, config, std::move(sol));
  sol.init_objective = sol.objective;
  sol.outer_objectives = {sol.objective};
  return sol;
}

MultiplierSolution SolveEqualityRegime(const Game& g, const Strategy& xc,
                                       const ThetaSolution& theta,
                                       const MultiplierConfig& config,
                                       const MultiplierStart& init) {
  const VectorXd b = BVector(g, xc);
  MultiplierProblem problem(g, xc, b, theta.theta, config.abar, true);
  const int m = problem.carrier_size();
  const int n = g.n();
  const std::vector<int>& carrier = problem.carrier();

  // Sum to one; Cz and Sz constant across carrier rows.
  MatrixXd eq = MatrixXd::Zero(1 + 2 * (m - 1), m + 1);
  VectorXd rhs = VectorXd::Zero(eq.rows());
  eq.row(0).head(m).setOnes();
  rhs[0] = 1.0;
  for (int r = 1; r < m; ++r) {
    eq.row(r).head(m) = problem.ck().row(carrier[r]) - problem.ck().row(carrier[0]);
    eq.row(m - 1 + r).head(m) =
        problem.sk().row(carrier[r]) - problem.sk().row(carrier[0]);
  }
  const MatrixXd eq_z = eq.leftCols(m);
  const VectorXd z0 =
      problem.xk() +
      eq_z.completeOrthogonalDecomposition().solve(rhs - eq_z * problem.xk());
  const bool consistent = (eq_z * z0 - rhs).cwiseAbs().maxCoeff() <= 1e-10;

  MultiplierSolution sol;
  sol.init_objective = MultiplierObjective(xc, init.z, init.eps, init.eta);
  sol.duals.lambda = VectorXd::Zero(n);
  if (!consistent || !(z0.minCoeff() > 0.0)) {
    sol.regime = MultiplierRegime::kEqualityInfeasible;
    sol.z = init.z;
    sol.eps = EpsLowerBound(g.C(), xc, init.z.vec());
    sol.eta = 1.0;
    sol.converged = false;
    sol = Finish(g, xc, theta, config, std::move(sol));
    sol.kkt_residual = kInfinity;
    return sol;
  }

  VectorXd p0(m + 1);
  p0.head(m) = z0;
  p0[m] = EpsLowerBound(g.C(), xc, Embed(problem, n, p0)) + 0.5;
  barrier::Options options;
  options.max_newton_steps = config.max_iterations;
  const barrier::Result result = barrier::Minimize(problem, eq, p0, options);
  const Polished pol = SnapEps(problem, eq, g, xc, result);

  sol.regime = MultiplierRegime::kEquality;
  sol.z = Strategy::FromWeights(Embed(problem, n, pol.p));
  sol.eps = pol.p[m];
  sol.eta = 1.0;
  sol.iterations = result.newton_steps;
  sol.outer_objectives = result.outer_objectives;
  sol.duals.lambda = pol.kkt.lambda;

  sol = Finish(g, xc, theta, config, std::move(sol));
  sol.kkt_residual = std::max({pol.kkt.stationarity, pol.kkt.complementarity,
                               std::max(0.0, -sol.slacks.Min())});
  sol.converged = result.converged && sol.kkt_residual <= config.kkt_tol &&
                  sol.slacks.Feasible(config.feas_tol);
  return sol;
}

}  // namespace

double ConstraintSlacks::Min() const {
  double m = std::min({s_budget, s_jensen_c, s_jensen_s, s_eta});
  if (s_rows.size() > 0) m = std::min(m, s_rows.minCoeff());
  return m;
}

double MultiplierObjective(const Strategy& x, const Strategy& z, double eps,
                           double eta) {
  return RelativeEntropy(z, x) + 0.5 * eps * eps + 0.5 * eta * eta;
}

ConstraintSlacks ConstraintValues(const Game& g, const Strategy& x,
                                  const ThetaSolution& theta,
                                  const Strategy& z, double eps, double eta,
                                  double abar) {
  const Strategy xc = x.OnCarrier();
  const VectorXd b = BVector(g, xc);
  const VectorXd cz = g.C() * z.vec();
  const double mean = xc.vec().dot(cz);
  ConstraintSlacks s;
  s.s_budget = b.dot(z.vec()) - eps * theta.theta * theta.theta;
  s.s_rows = VectorXd::Constant(g.n(), eps) - (cz.array() - mean).matrix();
  const double rhs = RightHandSide(theta, eta);
  s.s_jensen_c = rhs - JensenGap(xc, g.C(), z, abar);
  s.s_jensen_s = rhs - JensenGap(xc, g.S(), z, abar);
  s.s_eta = eta - 1.0;
  return s;
}

MultiplierStart FeasibleInit(const Game& g, const Strategy& x,
                             const ThetaSolution& theta, double abar) {
  const Strategy xc = x.OnCarrier();
  MultiplierStart start;
  if (theta.theta > kThetaZero) {
    start.z = theta.y;
    start.eps = 1.0;
    const double jensen = MaxJensenGap(g, xc, theta.y, abar);
    start.eta = DoubleEtaUntil(1.0, theta.theta, jensen, 1e300, false);
    return start;
  }
  int best = 0;
  for (int i = 1; i < xc.size(); ++i) {
    if (xc[i] > xc[best]) best = i;
  }
  start.z = Strategy::Pure(xc.size(), best);
  start.eps = 1.0;
  start.eta = 1.0;
  return start;
}

MultiplierSolution SolveMultiplier(const Game& g, const Strategy& x,
                                   const ThetaSolution& theta,
                                   const MultiplierConfig& config,
                                   const std::optional<MultiplierStart>& warm) {
  if (x.size() != g.n()) throw DimensionError("dimension mismatch");
  const Strategy xc = x.OnCarrier();
  if (xc.CarrierSize() == 1) return VertexSolution(g, xc, theta, config);

  const MultiplierStart init = FeasibleInit(g, xc, theta, config.abar);
  if (theta.theta <= kThetaZero) {
    return SolveEqualityRegime(g, xc, theta, config, init);
  }

  const VectorXd b = BVector(g, xc);
  MultiplierProblem problem(g, xc, b, theta.theta, config.abar, false);
  const int m = problem.carrier_size();
  const auto p0 = StrictRegularStart(g, xc, b, theta, config.abar, problem, warm);
  if (!p0) {
    // Reported as an unconverged solve at the feasible initial point.
    MultiplierSolution sol;
    sol.regime = MultiplierRegime::kRegular;
    sol.z = init.z;
    sol.eps = EpsLowerBound(g.C(), xc, init.z.vec());
    sol.eta = init.eta;
    sol.duals.lambda = VectorXd::Zero(g.n());
    sol = Finish(g, xc, theta, config, std::move(sol));
    sol.init_objective = sol.objective;
    sol.kkt_residual = kInfinity;
    return sol;
  }

  MatrixXd eq = MatrixXd::Zero(1, m + 2);
  eq.row(0).head(m).setOnes();
  barrier::Options options;
  options.max_newton_steps = config.max_iterations;
  const barrier::Result result = barrier::Minimize(problem, eq, *p0, options);
  const Polished pol = SnapEps(problem, eq, g, xc, result);

  MultiplierSolution sol;
  sol.regime = MultiplierRegime::kRegular;
  sol.init_objective = MultiplierObjective(xc, init.z, init.eps, init.eta);
  sol.z = Strategy::FromWeights(Embed(problem, g.n(), pol.p));
  sol.eps = pol.p[m];
  sol.eta = std::exp(pol.p[m + 1]);
  sol.iterations = result.newton_steps;
  sol.outer_objectives = result.outer_objectives;
  sol.duals.lambda0 = pol.kkt.lambda[0];
  sol.duals.lambda = pol.kkt.lambda.segment(1, g.n());
  sol.duals.kappa1 = pol.kkt.lambda[g.n() + 1];
  sol.duals.kappa2 = pol.kkt.lambda[g.n() + 2];
  // The bound is fitted as -u <= 0; d/d eta scales it by 1 / eta.
  sol.duals.kappa3 = pol.kkt.lambda[g.n() + 3] / sol.eta;

  sol = Finish(g, xc, theta, config, std::move(sol));
  sol.kkt_residual = std::max({pol.kkt.stationarity, pol.kkt.complementarity,
                               std::max(0.0, -sol.slacks.Min())});
  sol.converged = result.converged && sol.kkt_residual <= config.kkt_tol &&
                  sol.slacks.Feasible(config.feas_tol);
  return sol;
}

double MultiplierLagrangian(const Game& g, const Strategy& x,
                            const ThetaSolution& theta, double abar,
                            const VectorXd& z, double eps, double eta,
                            const MultiplierDuals& duals) {
  const Strategy xc = x.OnCarrier();
  const VectorXd b = BVector(g, xc);
  double value = 0.5 * eps * eps + 0.5 * eta * eta;
  for (int i = 0; i < xc.size(); ++i) {
    if (xc.InCarrier(i) && z[i] > 0.0) value += z[i] * std::log(z[i] / xc[i]);
  }
  const VectorXd cz = g.C() * z;
  const double mean = xc.vec().dot(cz);
  value -= duals.lambda0 * (b.dot(z) - eps * theta.theta * theta.theta);
  for (int r = 0; r < g.n(); ++r) {
    value += duals.lambda[r] * (cz[r] - mean - eps);
  }
  const double rhs = RightHandSide(theta, eta);
  value += duals.kappa1 * (JensenGap(xc, cz, abar) - rhs);
  value += duals.kappa2 * (JensenGap(xc, VectorXd(g.S() * z), abar) - rhs);
  value += duals.kappa3 * (1.0 - eta);
  return value;
}

double ScaledStationarity(const Strategy& z, const VectorXd& grad) {
  const int n = z.size();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!z.InCarrier(i)) continue;
    num += z[i] * z[i] * grad[i];
    den += z[i] * z[i];
  }
  const double nu = num / den;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    if (z.InCarrier(i)) worst = std::max(worst, std::abs(z[i] * (grad[i] - nu)));
  }
  for (Eigen::Index k = n; k < grad.size(); ++k) {
    worst = std::max(worst, std::abs(grad[k]));
  }
  return worst;
}

}  // namespace mrd
