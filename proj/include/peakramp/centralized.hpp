#pragma once

// Epigraph form of the peak-ramp problem, solved as one linear program:
//
//   minimize Γ  subject to  -Γ <= r[t] <= Γ,  r = ramps of Σ_n d_n,  (e, x, y, d)_n in F_n
//
// The optimum is the reference value for both distributed algorithms.

#include "peakramp/model.hpp"
#include "peakramp/qp_solver.hpp"

namespace peakramp {

enum class Quantity { Elastic, Charge, Discharge, NetDemand, Ramp, Peak };

/// Location of one scalar variable. `prosumer` is -1 for Ramp and Peak;
/// `slot` is -1 for Peak.
struct VariableRef {
  Quantity quantity;
  int prosumer;
  int slot;

  bool operator==(const VariableRef&) const = default;
};

/// Flat layout: prosumer n owns [4Tn, 4T(n+1)) as e, x, y, d blocks of T;
/// then T ramp variables; then Γ last. N*4T + T + 1 variables in total.
class EpigraphIndex {
 public:
  EpigraphIndex(int prosumers, int horizon) : prosumers_(prosumers), horizon_(horizon) {}

  int prosumers() const { return prosumers_; }
  int horizon() const { return horizon_; }
  Eigen::Index num_vars() const;

  Eigen::Index encode(const VariableRef& ref) const;
  VariableRef decode(Eigen::Index index) const;

  Eigen::Index at(int prosumer, Quantity q, int slot) const {
    return encode({q, prosumer, slot});
  }
  Eigen::Index ramp(int slot) const { return encode({Quantity::Ramp, -1, slot}); }
  Eigen::Index peak() const { return encode({Quantity::Peak, -1, -1}); }

 private:
  int prosumers_;
  int horizon_;
};

struct EpigraphProgram {
  QpProblem qp;
  EpigraphIndex index;
};

/// Throws InvalidInput (naming the prosumer) when the scenario is invalid.
EpigraphProgram build_epigraph_program(const Scenario& scenario);

struct CentralizedResult {
  SystemSolution solution;
  double objective = 0.0;  // optimal Γ
  int qp_iterations = 0;
};

/// Throws SolverFailure when the LP does not solve to optimality.
CentralizedResult solve_centralized(const Scenario& scenario);

}  // namespace peakramp
