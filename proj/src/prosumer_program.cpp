#include "peakramp/prosumer_program.hpp"

#include <algorithm>

namespace peakramp {

Eigen::Index ProgramBuilder::add_eq(double rhs) {
  eq_rhs_.push_back(rhs);
  return num_eq() - 1;
}

Eigen::Index ProgramBuilder::add_ineq(double rhs) {
  ineq_rhs_.push_back(rhs);
  return num_ineq() - 1;
}

void ProgramBuilder::eq(Eigen::Index row, Eigen::Index col, double value) {
  eq_trips_.emplace_back(row, col, value);
}

void ProgramBuilder::ineq(Eigen::Index row, Eigen::Index col, double value) {
  ineq_trips_.emplace_back(row, col, value);
}

QpProblem ProgramBuilder::finish(SparseMatrix quad, Vector lin) const {
  QpProblem p;
  p.quad = std::move(quad);
  p.lin = std::move(lin);
  p.eq_mat.resize(num_eq(), num_vars_);
  p.eq_mat.setFromTriplets(eq_trips_.begin(), eq_trips_.end());
  p.eq_rhs = Eigen::Map<const Vector>(eq_rhs_.data(), num_eq());
  p.ineq_mat.resize(num_ineq(), num_vars_);
  p.ineq_mat.setFromTriplets(ineq_trips_.begin(), ineq_trips_.end());
  p.ineq_rhs = Eigen::Map<const Vector>(ineq_rhs_.data(), num_ineq());
  return p;
}

void append_prosumer_rows(ProgramBuilder& b, const ProsumerParams& p,
                          const ProsumerColumns& c) {
  const Eigen::Index horizon = p.horizon();

  // d[t] - e[t] - x[t] + eff_d * y[t] = P[t] - W[t]
  for (Eigen::Index t = 0; t < horizon; ++t) {
    const auto row = b.add_eq(p.inelastic[t] - p.renewable[t]);
    b.eq(row, c.net_demand + t, 1.0);
    b.eq(row, c.elastic + t, -1.0);
    b.eq(row, c.charge + t, -1.0);
    b.eq(row, c.discharge + t, p.eff_discharge);
  }
  const auto balance = b.add_eq(p.elastic_total);
  for (Eigen::Index t = 0; t < horizon; ++t) b.eq(balance, c.elastic + t, 1.0);

  auto bounds = [&](Eigen::Index first, double lo, double hi) {
    for (Eigen::Index t = 0; t < horizon; ++t) {
      b.ineq(b.add_ineq(hi), first + t, 1.0);
      b.ineq(b.add_ineq(-lo), first + t, -1.0);
    }
  };
  bounds(c.elastic, p.elastic_min, p.elastic_max);
  bounds(c.charge, 0.0, p.charge_max);
  bounds(c.discharge, 0.0, p.discharge_max);

  // s0 + eff_c * sum x - sum y <= cap   and   -(...) <= s0
  for (Eigen::Index t = 0; t < horizon; ++t) {
    const auto upper = b.add_ineq(p.storage_cap - p.storage_init);
    const auto lower = b.add_ineq(p.storage_init);
    for (Eigen::Index k = 0; k <= t; ++k) {
      b.ineq(upper, c.charge + k, p.eff_charge);
      b.ineq(upper, c.discharge + k, -1.0);
      b.ineq(lower, c.charge + k, -p.eff_charge);
      b.ineq(lower, c.discharge + k, 1.0);
    }
  }
}

Schedule extract_schedule(const ProsumerParams& p, const Vector& primal,
                          const ProsumerColumns& c) {
  const Eigen::Index horizon = p.horizon();
  Vector e = primal.segment(c.elastic, horizon);
  Vector x = primal.segment(c.charge, horizon);
  Vector y = primal.segment(c.discharge, horizon);
  e = e.cwiseMax(p.elastic_min).cwiseMin(p.elastic_max);
  x = x.cwiseMax(0.0).cwiseMin(p.charge_max);
  y = y.cwiseMax(0.0).cwiseMin(p.discharge_max);
  return make_schedule(p, std::move(e), std::move(x), std::move(y));
}

Schedule solve_prosumer_qp(const ProsumerParams& p, double curvature, const Vector& lin,
                           const std::string& context) {
  const Eigen::Index horizon = p.horizon();
  if (lin.size() != horizon) throw InvalidInput(context + ": linear term length mismatch");
  const ProsumerColumns cols{0, horizon, 2 * horizon, 3 * horizon};
  ProgramBuilder builder(4 * horizon);
  append_prosumer_rows(builder, p, cols);

  std::vector<Triplet> trips;
  trips.reserve(horizon);
  for (Eigen::Index t = 0; t < horizon; ++t)
    trips.emplace_back(cols.net_demand + t, cols.net_demand + t, curvature);
  SparseMatrix quad(4 * horizon, 4 * horizon);
  quad.setFromTriplets(trips.begin(), trips.end());
  Vector q = Vector::Zero(4 * horizon);
  q.segment(cols.net_demand, horizon) = lin;

  const QpProblem qp = builder.finish(std::move(quad), std::move(q));
  const QpSolution sol = solve_qp_or_throw(qp, context);
  return extract_schedule(p, sol.primal, cols);
}

}  // namespace peakramp
