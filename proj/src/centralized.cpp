#include "peakramp/centralized.hpp"

#include "peakramp/prosumer_program.hpp"

#include <sstream>

namespace peakramp {

Eigen::Index EpigraphIndex::num_vars() const {
  return static_cast<Eigen::Index>(prosumers_) * 4 * horizon_ + horizon_ + 1;
}

Eigen::Index EpigraphIndex::encode(const VariableRef& ref) const {
  const Eigen::Index t = horizon_;
  const Eigen::Index tail = static_cast<Eigen::Index>(prosumers_) * 4 * t;
  auto bad = [&] {
    std::ostringstream msg;
    msg << "EpigraphIndex: reference out of range (prosumer " << ref.prosumer << ", slot "
        << ref.slot << ")";
    return InvalidInput(msg.str());
  };
  if (ref.quantity == Quantity::Peak) {
    if (ref.prosumer != -1 || ref.slot != -1) throw bad();
    return tail + t;
  }
  if (ref.slot < 0 || ref.slot >= horizon_) throw bad();
  if (ref.quantity == Quantity::Ramp) {
    if (ref.prosumer != -1) throw bad();
    return tail + ref.slot;
  }
  if (ref.prosumer < 0 || ref.prosumer >= prosumers_) throw bad();
  const Eigen::Index block = static_cast<Eigen::Index>(ref.quantity);  // 0..3
  return static_cast<Eigen::Index>(ref.prosumer) * 4 * t + block * t + ref.slot;
}

VariableRef EpigraphIndex::decode(Eigen::Index index) const {
  const Eigen::Index t = horizon_;
  const Eigen::Index tail = static_cast<Eigen::Index>(prosumers_) * 4 * t;
  if (index < 0 || index >= num_vars()) throw InvalidInput("EpigraphIndex: index out of range");
  if (index == tail + t) return {Quantity::Peak, -1, -1};
  if (index >= tail) return {Quantity::Ramp, -1, static_cast<int>(index - tail)};
  const auto prosumer = static_cast<int>(index / (4 * t));
  const Eigen::Index local = index % (4 * t);
  return {static_cast<Quantity>(local / t), prosumer, static_cast<int>(local % t)};
}

namespace {

ProsumerColumns columns_of(const EpigraphIndex& idx, int n) {
  return {idx.at(n, Quantity::Elastic, 0), idx.at(n, Quantity::Charge, 0),
          idx.at(n, Quantity::Discharge, 0), idx.at(n, Quantity::NetDemand, 0)};
}

}  // namespace

EpigraphProgram build_epigraph_program(const Scenario& sc) {
  validate(sc);
  const int prosumers = sc.size();
  const int horizon = sc.horizon;
  EpigraphIndex idx(prosumers, horizon);
  ProgramBuilder b(idx.num_vars());

  for (int n = 0; n < prosumers; ++n) append_prosumer_rows(b, sc.prosumers[n], columns_of(idx, n));

  // r[t] - Σ_n d_n[t] + Σ_n d_n[t-1] = 0, with Σ_n d_n[-1] = prev_net_load.
  for (int t = 0; t < horizon; ++t) {
    const auto row = b.add_eq(t == 0 ? -sc.prev_net_load : 0.0);
    b.eq(row, idx.ramp(t), 1.0);
    for (int n = 0; n < prosumers; ++n) {
      b.eq(row, idx.at(n, Quantity::NetDemand, t), -1.0);
      if (t > 0) b.eq(row, idx.at(n, Quantity::NetDemand, t - 1), 1.0);
    }
  }
  // r[t] - Γ <= 0 and -r[t] - Γ <= 0
  for (int t = 0; t < horizon; ++t) {
    const auto up = b.add_ineq(0.0);
    b.ineq(up, idx.ramp(t), 1.0);
    b.ineq(up, idx.peak(), -1.0);
    const auto down = b.add_ineq(0.0);
    b.ineq(down, idx.ramp(t), -1.0);
    b.ineq(down, idx.peak(), -1.0);
  }

  Vector lin = Vector::Zero(idx.num_vars());
  lin[idx.peak()] = 1.0;
  SparseMatrix quad(idx.num_vars(), idx.num_vars());
  return {b.finish(std::move(quad), std::move(lin)), idx};
}

CentralizedResult solve_centralized(const Scenario& sc) {
  const EpigraphProgram prog = build_epigraph_program(sc);
  const QpSolution sol = solve_qp_or_throw(prog.qp, "centralized peak-ramp program");

  std::vector<Schedule> schedules;
  schedules.reserve(sc.prosumers.size());
  for (int n = 0; n < sc.size(); ++n)
    schedules.push_back(extract_schedule(sc.prosumers[n], sol.primal, columns_of(prog.index, n)));

  CentralizedResult out;
  out.solution = assemble(std::move(schedules), sc.prev_net_load);
  out.objective = sol.primal[prog.index.peak()];
  out.qp_iterations = sol.iterations;
  return out;
}

}  // namespace peakramp
