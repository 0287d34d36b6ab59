#include "peakramp/qp_solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace peakramp {

namespace {

constexpr double kRegularization = 1e-7;
constexpr double kMaxRegularization = 1e-3;
constexpr double kStepFraction = 0.99;
constexpr int kRefinementSteps = 3;
constexpr double kDivergence = 1e8;
constexpr double kRayNorm = 1e6;
constexpr double kRayTol = 1e-7;
constexpr double kPolishProximal = 1e-6;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

SparseMatrix dense_to_sparse(const Matrix& m) {
  std::vector<Triplet> trips;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) trips.emplace_back(i, j, m(i, j));
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

// Largest step in [0, 1] keeping v + alpha * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

// Factors K = [[Q + G'WG + dI, A'], [A, -dI]] and solves with iterative
// refinement against the unregularized matrix.
class KktSolver {
 public:
  explicit KktSolver(const QpProblem& p)
      : p_(p), gt_(p.ineq_mat.transpose()), n_(p.num_vars()), me_(p.num_eq()) {}

  /// Raises the regularization after a numerical breakdown; false once it
  /// has reached kMaxRegularization.
  bool escalate() {
    if (reg_ >= kMaxRegularization) return false;
    reg_ = std::min(kMaxRegularization, reg_ * 100.0);
    return true;
  }

  bool factor(const Vector& w) {
    if (p_.num_ineq() > 0) {
      hess_ = p_.quad + SparseMatrix(gt_ * w.asDiagonal() * p_.ineq_mat);
    } else {
      hess_ = p_.quad;
    }
    trips_.clear();
    trips_.reserve(hess_.nonZeros() + p_.eq_mat.nonZeros() + n_ + me_);
    for (Eigen::Index j = 0; j < hess_.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(hess_, j); it; ++it)
        if (it.row() > j) trips_.emplace_back(it.row(), j, it.value());
    for (Eigen::Index j = 0; j < n_; ++j)
      trips_.emplace_back(j, j, reg_);
    for (Eigen::Index j = 0; j < hess_.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(hess_, j); it; ++it)
        if (it.row() == j) trips_.emplace_back(j, j, it.value());
    for (Eigen::Index j = 0; j < p_.eq_mat.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(p_.eq_mat, j); it; ++it)
        trips_.emplace_back(n_ + it.row(), j, it.value());
    for (Eigen::Index i = 0; i < me_; ++i)
      trips_.emplace_back(n_ + i, n_ + i, -reg_);

    SparseMatrix k(n_ + me_, n_ + me_);
    k.setFromTriplets(trips_.begin(), trips_.end());
    if (!analyzed_ || k.nonZeros() != pattern_nnz_) {
      ldlt_.analyzePattern(k);
      analyzed_ = true;
      pattern_nnz_ = k.nonZeros();
    }
    ldlt_.factorize(k);
    return ldlt_.info() == Eigen::Success;
  }

  void solve(const Vector& rx, const Vector& ry, Vector& dx, Vector& dy) const {
    Vector rhs(n_ + me_);
    rhs << rx, ry;
    Vector sol = ldlt_.solve(rhs);
    Vector res = rhs - apply_unregularized(sol);
    double res_norm = inf_norm(res);
    // Refinement stops as soon as it fails to reduce the residual, which
    // happens when the regularization dominates a badly scaled system.
    for (int step = 0; step < kRefinementSteps; ++step) {
      if (res_norm <= 1e-14 * std::max(1.0, inf_norm(rhs))) break;
      const Vector next = sol + ldlt_.solve(res);
      const Vector next_res = rhs - apply_unregularized(next);
      const double next_norm = inf_norm(next_res);
      if (!(next_norm < res_norm)) break;
      sol = next;
      res = next_res;
      res_norm = next_norm;
    }
    dx = sol.head(n_);
    dy = sol.tail(me_);
  }

 private:
  Vector apply_unregularized(const Vector& v) const {
    Vector out(n_ + me_);
    const auto vx = v.head(n_);
    const auto vy = v.tail(me_);
    out.head(n_) = hess_ * vx;
    if (me_ > 0) {
      out.head(n_) += p_.eq_mat.transpose() * vy;
      out.tail(me_) = p_.eq_mat * vx;
    }
    return out;
  }

  const QpProblem& p_;
  SparseMatrix gt_;
  Eigen::Index n_;
  Eigen::Index me_;
  SparseMatrix hess_;
  std::vector<Triplet> trips_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  double reg_ = kRegularization;
  bool analyzed_ = false;
  Eigen::Index pattern_nnz_ = 0;
};

KktResiduals residuals_at(const QpProblem& p, const Vector& x, const Vector& y,
                          const Vector& z) {
  KktResiduals r;
  Vector grad = p.quad * x + p.lin;
  if (p.num_eq() > 0) grad += p.eq_mat.transpose() * y;
  if (p.num_ineq() > 0) grad += p.ineq_mat.transpose() * z;
  r.stationarity = inf_norm(grad);
  if (p.num_eq() > 0) r.primal_eq = inf_norm(p.eq_mat * x - p.eq_rhs);
  if (p.num_ineq() > 0) {
    const Vector slack = p.ineq_rhs - p.ineq_mat * x;
    r.primal_ineq = std::max(0.0, -slack.minCoeff());
    r.comp_slack = inf_norm(z.cwiseProduct(slack));
    r.comp_slack = std::max(r.comp_slack, -z.minCoeff());
  }
  return r;
}

// Normalized dual ray: A'y + G'z ~ 0, z >= 0, b'y + h'z < 0 certifies that
// the primal constraints are inconsistent.
bool is_infeasibility_ray(const QpProblem& p, const Vector& y, const Vector& z) {
  const double scale = std::max(inf_norm(y), inf_norm(z));
  if (scale < kRayNorm) return false;
  const Vector yy = y / scale;
  const Vector zz = z / scale;
  Vector combo = Vector::Zero(p.num_vars());
  if (p.num_eq() > 0) combo += p.eq_mat.transpose() * yy;
  if (p.num_ineq() > 0) combo += p.ineq_mat.transpose() * zz;
  const double gap = p.eq_rhs.dot(yy) + p.ineq_rhs.dot(zz);
  return inf_norm(combo) <= kRayTol && gap < -kRayTol;
}

// Normalized primal ray: Qd ~ 0, Ad ~ 0, Gd <= ~0, q'd < 0.
bool is_unbounded_ray(const QpProblem& p, const Vector& x) {
  const double scale = inf_norm(x);
  if (scale < kRayNorm) return false;
  const Vector d = x / scale;
  if (inf_norm(p.quad * d) > kRayTol) return false;
  if (p.num_eq() > 0 && inf_norm(p.eq_mat * d) > kRayTol) return false;
  if (p.num_ineq() > 0 && (p.ineq_mat * d).maxCoeff() > kRayTol) return false;
  return p.lin.dot(d) < -kRayTol;
}

QpSolution finish(const QpProblem& p, Vector x, Vector y, Vector z, QpStatus status,
                  int iterations) {
  QpSolution sol;
  sol.objective = p.objective(x);
  sol.primal = std::move(x);
  sol.eq_duals = std::move(y);
  sol.ineq_duals = std::move(z);
  sol.status = status;
  sol.iterations = iterations;
  return sol;
}

QpSolution solve_equality_only(const QpProblem& p, double tol_scaled) {
  KktSolver kkt(p);
  Vector x, y;
  Vector z(0);
  if (!kkt.factor(Vector(0))) {
    return finish(p, Vector::Zero(p.num_vars()), Vector::Zero(p.num_eq()), z,
                  QpStatus::Infeasible, 1);
  }
  kkt.solve(-p.lin, p.eq_rhs, x, y);
  const auto r = residuals_at(p, x, y, z);
  QpStatus status = QpStatus::Optimal;
  if (r.primal_eq > tol_scaled) {
    status = QpStatus::Infeasible;
  } else if (r.stationarity > tol_scaled) {
    status = QpStatus::Unbounded;
  }
  return finish(p, std::move(x), std::move(y), std::move(z), status, 1);
}

// Interior-point iterates approach a degenerate optimum slowly, so the final
// point is refined by treating every constraint with z_i > s_i as an equality
// and solving the resulting equality QP with a proximal term centred on the
// iterate. The polished point is kept only when its residuals are no worse.
QpSolution polish(const QpProblem& p, QpSolution ipm) {
  const Vector slack = p.ineq_rhs - p.ineq_mat * ipm.primal;
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < slack.size(); ++i)
    if (ipm.ineq_duals[i] > slack[i]) active.push_back(i);
  if (active.empty()) return ipm;

  std::vector<Eigen::Index> row_of(slack.size(), -1);
  for (std::size_t k = 0; k < active.size(); ++k) row_of[active[k]] = static_cast<Eigen::Index>(k);
  const Eigen::Index me = p.num_eq();
  std::vector<Triplet> trips;
  for (Eigen::Index j = 0; j < p.eq_mat.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(p.eq_mat, j); it; ++it) trips.emplace_back(it.row(), j, it.value());
  for (Eigen::Index j = 0; j < p.ineq_mat.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(p.ineq_mat, j); it; ++it)
      if (row_of[it.row()] >= 0) trips.emplace_back(me + row_of[it.row()], j, it.value());

  QpProblem eq;
  const Eigen::Index n = p.num_vars();
  const auto na = static_cast<Eigen::Index>(active.size());
  SparseMatrix prox(n, n);
  prox.setIdentity();
  eq.quad = p.quad + kPolishProximal * prox;
  eq.lin = p.lin - kPolishProximal * ipm.primal;
  eq.eq_mat.resize(me + na, n);
  eq.eq_mat.setFromTriplets(trips.begin(), trips.end());
  eq.eq_rhs.resize(me + na);
  eq.eq_rhs.head(me) = p.eq_rhs;
  for (Eigen::Index k = 0; k < na; ++k) eq.eq_rhs[me + k] = p.ineq_rhs[active[k]];
  eq.ineq_mat.resize(0, n);
  eq.ineq_rhs.resize(0);

  KktSolver kkt(eq);
  if (!kkt.factor(Vector(0))) return ipm;
  Vector x, yy;
  kkt.solve(-eq.lin, eq.eq_rhs, x, yy);
  if (!x.allFinite() || !yy.allFinite()) return ipm;
  Vector z = Vector::Zero(p.num_ineq());
  for (Eigen::Index k = 0; k < na; ++k) z[active[k]] = yy[me + k];
  Vector y = yy.head(me);

  if (residuals_at(p, x, y, z).max() > residuals_at(p, ipm.primal, ipm.eq_duals, ipm.ineq_duals).max())
    return ipm;
  return finish(p, std::move(x), std::move(y), std::move(z), QpStatus::Optimal, ipm.iterations);
}

}  // namespace

double KktResiduals::max() const {
  return std::max({stationarity, primal_eq, primal_ineq, comp_slack});
}

double QpProblem::objective(const Vector& x) const {
  return 0.5 * x.dot(quad * x) + lin.dot(x);
}

void QpProblem::validate() const {
  const auto n = num_vars();
  auto fail = [](const std::string& why) { throw InvalidInput("QpProblem: " + why); };
  if (quad.rows() != n || quad.cols() != n) fail("quad must be n x n");
  if (eq_mat.rows() != num_eq() || eq_mat.cols() != n) fail("eq_mat dimensions");
  if (ineq_mat.rows() != num_ineq() || ineq_mat.cols() != n) fail("ineq_mat dimensions");
  if (!lin.allFinite() || !eq_rhs.allFinite() || !ineq_rhs.allFinite())
    fail("non-finite vector data");
  if (quad.nonZeros() == 0) return;

  const SparseMatrix asym = quad - SparseMatrix(quad.transpose());
  double qmax = 0.0;
  for (Eigen::Index j = 0; j < quad.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(quad, j); it; ++it)
      qmax = std::max(qmax, std::abs(it.value()));
  if (!std::isfinite(qmax)) fail("non-finite quad");
  double amax = 0.0;
  for (Eigen::Index j = 0; j < asym.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(asym, j); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  if (amax > 1e-10 * std::max(1.0, qmax)) fail("quad is not symmetric");

  // A PSD matrix shifted by eps*I has an LDL' factorization with positive
  // pivots; a clearly negative pivot means an indefinite quad.
  const double eps = 1e-10 * std::max(1.0, qmax);
  SparseMatrix shifted = quad;
  for (Eigen::Index j = 0; j < n; ++j) shifted.coeffRef(j, j) += eps;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) fail("quad factorization failed");
  if (ldlt.vectorD().minCoeff() < -1e-8 * std::max(1.0, qmax))
    fail("quad is not positive semidefinite");
}

QpProblem QpProblem::from_dense(const Matrix& quad, const Vector& lin,
                                const Matrix& eq_mat, const Vector& eq_rhs,
                                const Matrix& ineq_mat, const Vector& ineq_rhs) {
  QpProblem p;
  p.quad = dense_to_sparse(quad);
  p.lin = lin;
  p.eq_mat = dense_to_sparse(eq_mat);
  p.eq_rhs = eq_rhs;
  p.ineq_mat = dense_to_sparse(ineq_mat);
  p.ineq_rhs = ineq_rhs;
  return p;
}

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::IterLimit: return "iteration_limit";
  }
  return "unknown";
}

KktResiduals kkt_residuals(const QpProblem& p, const QpSolution& sol) {
  if (sol.primal.size() != p.num_vars() || sol.eq_duals.size() != p.num_eq() ||
      sol.ineq_duals.size() != p.num_ineq()) {
    throw InvalidInput("kkt_residuals: solution dimensions do not match problem");
  }
  return residuals_at(p, sol.primal, sol.eq_duals, sol.ineq_duals);
}

QpSolution solve_qp(const QpProblem& p, double tol, int max_iter) {
  p.validate();
  const auto n = p.num_vars();
  const auto me = p.num_eq();
  const auto mi = p.num_ineq();
  const double data_scale =
      std::max({1.0, inf_norm(p.lin), inf_norm(p.eq_rhs), inf_norm(p.ineq_rhs)});
  const double tol_scaled = tol * data_scale;

  if (mi == 0) return solve_equality_only(p, tol_scaled);

  KktSolver kkt(p);
  const SparseMatrix& g = p.ineq_mat;

  // Starting point: least-squares style solve with unit scaling, then shift
  // slacks and multipliers into the positive orthant.
  Vector x, y;
  if (!kkt.factor(Vector::Ones(mi))) {
    return finish(p, Vector::Zero(n), Vector::Zero(me), Vector::Ones(mi),
                  QpStatus::Infeasible, 0);
  }
  kkt.solve(-p.lin + g.transpose() * p.ineq_rhs, p.eq_rhs, x, y);
  Vector s = p.ineq_rhs - g * x;
  Vector z = -s;
  auto shift = [](Vector& v) {
    const double lo = v.minCoeff();
    if (lo <= 0.0) v.array() += 1.0 - lo;
  };
  shift(s);
  shift(z);

  const auto primal_residual = [&](const Vector& xx, const Vector& ss) {
    double r = 0.0;
    if (me > 0) r = inf_norm(p.eq_mat * xx - p.eq_rhs);
    return std::max(r, inf_norm(g * xx + ss - p.ineq_rhs));
  };
  const double initial_primal = std::max(1.0, primal_residual(x, s));

  Vector dx, dy, dz, ds, dx_aff, dy_aff, dz_aff, ds_aff;
  for (int iter = 0; iter < max_iter; ++iter) {
    const auto res = residuals_at(p, x, y, z);
    if (res.max() <= tol_scaled) {
      return polish(p, finish(p, std::move(x), std::move(y), std::move(z), QpStatus::Optimal, iter));
    }
    if (primal_residual(x, s) > kDivergence * initial_primal ||
        is_infeasibility_ray(p, y, z)) {
      return finish(p, std::move(x), std::move(y), std::move(z), QpStatus::Infeasible, iter);
    }
    if (is_unbounded_ray(p, x)) {
      return finish(p, std::move(x), std::move(y), std::move(z), QpStatus::Unbounded, iter);
    }

    Vector rd = p.quad * x + p.lin + g.transpose() * z;
    Vector rp = Vector::Zero(me);
    if (me > 0) {
      rd += p.eq_mat.transpose() * y;
      rp = p.eq_mat * x - p.eq_rhs;
    }
    const Vector ri = g * x + s - p.ineq_rhs;
    const double mu = s.dot(z) / static_cast<double>(mi);

    const Vector w = z.cwiseQuotient(s);
    if (!kkt.factor(w)) {
      if (kkt.escalate()) continue;
      break;
    }

    // Solves the Newton system for a given complementarity right-hand side rc.
    auto newton = [&](const Vector& rc, Vector& ox, Vector& oy, Vector& oz, Vector& os) {
      const Vector t = (-rc + z.cwiseProduct(ri)).cwiseQuotient(s);
      kkt.solve(-rd - g.transpose() * t, -rp, ox, oy);
      oz = t + w.cwiseProduct(g * ox);
      os = -ri - g * ox;
    };

    const Vector sz = s.cwiseProduct(z);
    newton(sz, dx_aff, dy_aff, dz_aff, ds_aff);
    const double alpha_aff = std::min(max_step(s, ds_aff), max_step(z, dz_aff));
    const double mu_aff =
        (s + alpha_aff * ds_aff).dot(z + alpha_aff * dz_aff) / static_cast<double>(mi);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    const Vector rc = sz + ds_aff.cwiseProduct(dz_aff) - Vector::Constant(mi, sigma * mu);
    newton(rc, dx, dy, dz, ds);
    const double step = std::min(1.0, kStepFraction * std::min(max_step(s, ds), max_step(z, dz)));
    if (!(step > 1e-14)) {
      // A collapsed step means the Newton direction is numerically wrong;
      // retry the iteration with a stronger regularization.
      if (kkt.escalate()) continue;
      break;
    }

    x += step * dx;
    y += step * dy;
    z += step * dz;
    s += step * ds;
    if (!x.allFinite() || !z.allFinite() || !s.allFinite()) break;
  }

  if (residuals_at(p, x, y, z).max() <= tol_scaled) {
    return polish(p, finish(p, std::move(x), std::move(y), std::move(z), QpStatus::Optimal, max_iter));
  }
  QpStatus status = QpStatus::IterLimit;
  if (is_infeasibility_ray(p, y, z)) {
    status = QpStatus::Infeasible;
  } else if (is_unbounded_ray(p, x)) {
    status = QpStatus::Unbounded;
  }
  return finish(p, std::move(x), std::move(y), std::move(z), status, max_iter);
}

QpSolution solve_qp_or_throw(const QpProblem& p, const std::string& context, double tol,
                             int max_iter) {
  QpSolution sol = solve_qp(p, tol, max_iter);
  if (!sol.optimal()) {
    const auto r = residuals_at(p, sol.primal, sol.eq_duals, sol.ineq_duals);
    std::ostringstream msg;
    msg << context << ": QP solve ended with status " << to_string(sol.status)
        << " after " << sol.iterations << " iterations (stationarity " << r.stationarity
        << ", primal_eq " << r.primal_eq << ", primal_ineq " << r.primal_ineq
        << ", comp_slack " << r.comp_slack << ")";
    throw SolverFailure(msg.str());
  }
  return sol;
}

}  // namespace peakramp
