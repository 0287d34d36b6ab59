#pragma once

#include "oracles/active_set_oracle.hpp"
#include "peakramp/qp_solver.hpp"

namespace testing_support {

inline peakramp::QpProblem to_qp_problem(const oracle::BoxQp& b) {
  const auto n = b.lin.size();
  Eigen::MatrixXd g(2 * n, n);
  g << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd h(2 * n);
  h << b.upper, -b.lower;
  return peakramp::QpProblem::from_dense(b.quad, b.lin, b.eq_row.transpose(),
                                         Eigen::VectorXd::Constant(1, b.eq_rhs), g, h);
}

}  // namespace testing_support
