#pragma once

// Constraint rows of one prosumer's feasible set F_n, shared by the
// centralized program and the ADMM prosumer subproblems.
//
// Storage levels are not variables: s[t+1] = s0 + eff_c * sum_{k<=t} x[k]
// - sum_{k<=t} y[k] is substituted into 0 <= s <= cap, giving 2T cumulative
// inequalities in (x, y).

#include "peakramp/model.hpp"
#include "peakramp/qp_solver.hpp"

#include <vector>

namespace peakramp {

/// First column of each length-T block.
struct ProsumerColumns {
  Eigen::Index elastic = 0;
  Eigen::Index charge = 0;
  Eigen::Index discharge = 0;
  Eigen::Index net_demand = 0;
};

/// Accumulates sparse constraint rows; `finish` produces a QpProblem with the
/// given objective.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(Eigen::Index num_vars) : num_vars_(num_vars) {}

  Eigen::Index num_vars() const { return num_vars_; }
  Eigen::Index num_eq() const { return static_cast<Eigen::Index>(eq_rhs_.size()); }
  Eigen::Index num_ineq() const { return static_cast<Eigen::Index>(ineq_rhs_.size()); }

  /// Starts a row and returns its index; add coefficients with eq()/ineq().
  Eigen::Index add_eq(double rhs);
  Eigen::Index add_ineq(double rhs);
  void eq(Eigen::Index row, Eigen::Index col, double value);
  void ineq(Eigen::Index row, Eigen::Index col, double value);

  QpProblem finish(SparseMatrix quad, Vector lin) const;

 private:
  Eigen::Index num_vars_;
  std::vector<Triplet> eq_trips_, ineq_trips_;
  std::vector<double> eq_rhs_, ineq_rhs_;
};

/// Rows per prosumer: T + 1 equalities (net-demand identity, elastic
/// balance) and 8T inequalities (elastic, charge, discharge and storage
/// bounds).
void append_prosumer_rows(ProgramBuilder& builder, const ProsumerParams& params,
                          const ProsumerColumns& cols);

inline constexpr Eigen::Index prosumer_eq_rows(Eigen::Index horizon) { return horizon + 1; }
inline constexpr Eigen::Index prosumer_ineq_rows(Eigen::Index horizon) { return 8 * horizon; }

/// Reads (e, x, y) out of a primal vector, clamps round-off outside the
/// per-slot bounds, and rebuilds storage and net demand from them.
Schedule extract_schedule(const ProsumerParams& params, const Vector& primal,
                          const ProsumerColumns& cols);

/// minimize 1/2 * curvature * |d|^2 + lin'd over F_n, variables (e, x, y, d).
Schedule solve_prosumer_qp(const ProsumerParams& params, double curvature,
                           const Vector& lin, const std::string& context);

}  // namespace peakramp
