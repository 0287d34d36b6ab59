#pragma once

// Convex quadratic programs in the form
//
//   minimize    1/2 x'Qx + q'x
//   subject to  Ax = b,  Gx <= h
//
// solved by a primal-dual interior-point method (Mehrotra predictor-corrector)
// on a regularized quasi-definite KKT system. Q may be zero, so linear
// programs go through the same path.

#include "peakramp/model.hpp"

#include <Eigen/Sparse>

namespace peakramp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct QpProblem {
  SparseMatrix quad;      // n x n, symmetric PSD, full (not triangular) storage
  Vector lin;             // n
  SparseMatrix eq_mat;    // m_e x n
  Vector eq_rhs;          // m_e
  SparseMatrix ineq_mat;  // m_i x n
  Vector ineq_rhs;        // m_i

  Eigen::Index num_vars() const { return lin.size(); }
  Eigen::Index num_eq() const { return eq_rhs.size(); }
  Eigen::Index num_ineq() const { return ineq_rhs.size(); }

  double objective(const Vector& x) const;

  /// Throws InvalidInput on inconsistent dimensions, an asymmetric quad, or a
  /// quad with a negative pivot beyond round-off.
  void validate() const;

  static QpProblem from_dense(const Matrix& quad, const Vector& lin,
                              const Matrix& eq_mat, const Vector& eq_rhs,
                              const Matrix& ineq_mat, const Vector& ineq_rhs);
};

enum class QpStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(QpStatus status);

struct QpSolution {
  Vector primal;
  Vector eq_duals;
  Vector ineq_duals;  // >= 0
  double objective = 0.0;
  QpStatus status = QpStatus::IterLimit;
  int iterations = 0;

  bool optimal() const { return status == QpStatus::Optimal; }
};

struct KktResiduals {
  double stationarity = 0.0;  // |Qx + q + A'y + G'z|_inf
  double primal_eq = 0.0;     // |Ax - b|_inf
  double primal_ineq = 0.0;   // |max(Gx - h, 0)|_inf
  double comp_slack = 0.0;    // max_i |z_i (h - Gx)_i|, plus any negative z_i

  double max() const;
};

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& sol);

inline constexpr double kDefaultQpTol = 1e-8;
inline constexpr int kDefaultQpMaxIter = 200;

/// Optimal means every KKT residual is at most tol * max(1, |data|_inf), where
/// |data|_inf is the largest magnitude among q, b and h. Deterministic.
QpSolution solve_qp(const QpProblem& problem, double tol = kDefaultQpTol,
                    int max_iter = kDefaultQpMaxIter);

/// Like solve_qp but throws SolverFailure (with `context` in the message)
/// unless the status is Optimal.
QpSolution solve_qp_or_throw(const QpProblem& problem, const std::string& context,
                             double tol = kDefaultQpTol,
                             int max_iter = kDefaultQpMaxIter);

}  // namespace peakramp
