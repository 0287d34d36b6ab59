#pragma once

// Prosumer energy model: parameters, schedules, and the arithmetic that turns
// schedules into net demand, system net load, and ramps.
//
// Slots are 0-based in code. Slot t of the day is index t-1; the storage
// trajectory has T+1 entries, entry 0 being the initial level.

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace peakramp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Malformed or infeasible input data (bad dimensions, violated invariants).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical solve that did not reach an optimal answer.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kFeasibilityTol = 1e-6;

struct ProsumerParams {
  Vector inelastic;  // P_n[t], kWh
  Vector renewable;  // W_n[t], kWh
  double elastic_total = 0.0;
  double elastic_min = 0.0;
  double elastic_max = 0.0;
  double charge_max = 0.0;
  double discharge_max = 0.0;
  double storage_cap = 0.0;
  double storage_init = 0.0;
  double eff_charge = 1.0;
  double eff_discharge = 1.0;

  int horizon() const { return static_cast<int>(inelastic.size()); }
};

bool operator==(const ProsumerParams& a, const ProsumerParams& b);

/// Throws InvalidInput naming `label` when an invariant of ProsumerParams
/// fails, including an elastic budget that cannot be met within the per-slot
/// bounds.
void validate(const ProsumerParams& params, const std::string& label);

struct Schedule {
  Vector elastic;     // e_n[t]
  Vector charge;      // x_n[t]
  Vector discharge;   // y_n[t]
  Vector storage;     // s_n, length T+1
  Vector net_demand;  // d_n[t]
};

struct HyperParams {
  double rho = 0.5;
  double gamma = 0.5;
  double eta = 0.5;
  double eps_abs = 1e-5;
  double eps_rel = 1e-4;
  int max_iter = 200;
  int max_events = 20000;

  bool operator==(const HyperParams&) const = default;
};

void validate(const HyperParams& hyper);

struct Scenario {
  std::vector<ProsumerParams> prosumers;
  int horizon = 0;
  double prev_net_load = 0.0;
  HyperParams hyper;

  int size() const { return static_cast<int>(prosumers.size()); }

  bool operator==(const Scenario&) const = default;
};

/// Checks N >= 1, T >= 2, a common horizon, and every prosumer.
void validate(const Scenario& scenario);

struct SystemSolution {
  std::vector<Schedule> schedules;
  Vector net_load;
  Vector ramps;
  double peak_ramp = 0.0;
};

Vector net_demand(const ProsumerParams& params, const Vector& elastic,
                  const Vector& charge, const Vector& discharge);

Vector storage_trajectory(const ProsumerParams& params, const Vector& charge,
                          const Vector& discharge);

Vector net_load(std::span<const Vector> demands);

/// r[0] = l[0] - prev_net_load, r[t] = l[t] - l[t-1].
Vector ramp_vector(const Vector& load, double prev_net_load);

double peak_ramp(const Vector& ramps);

/// Fills in storage and net demand from the three decision vectors.
Schedule make_schedule(const ProsumerParams& params, Vector elastic,
                       Vector charge, Vector discharge);

/// Net load, ramps and peak ramp for a set of per-prosumer schedules.
SystemSolution assemble(std::vector<Schedule> schedules, double prev_net_load);

enum class ConstraintKind {
  Shape,
  ElasticLower,
  ElasticUpper,
  ElasticBalance,
  ChargeLower,
  ChargeUpper,
  DischargeLower,
  DischargeUpper,
  StorageInitial,
  StorageRecursion,
  StorageLower,
  StorageUpper,
  NetDemandIdentity,
};

const char* to_string(ConstraintKind kind);

struct Violation {
  ConstraintKind kind;
  int slot;  // -1 when the constraint is not slot-indexed
  double magnitude;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double max_violation() const;
  bool has(ConstraintKind kind) const;
};

FeasibilityReport check_feasible(const ProsumerParams& params,
                                 const Schedule& schedule,
                                 double tol = kFeasibilityTol);

}  // namespace peakramp
