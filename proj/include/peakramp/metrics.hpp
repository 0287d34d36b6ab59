#pragma once

// Experiment-level comparison of a baseline against an optimized schedule,
// plus convergence summaries of the distributed runs.

#include "peakramp/async_admm.hpp"
#include "peakramp/model.hpp"
#include "peakramp/sync_admm.hpp"

#include <string>
#include <vector>

namespace peakramp {

/// Objective per iteration (sync) or per arrival event (async).
struct ObjectiveTrace {
  std::string algorithm;
  std::vector<long> steps;
  std::vector<double> objectives;
};

ObjectiveTrace objective_trace(const std::string& algorithm, const std::vector<SyncRecord>& trace);
ObjectiveTrace objective_trace(const std::string& algorithm, const std::vector<AsyncRecord>& trace);

inline constexpr double kConvergedRelTol = 0.01;
inline constexpr double kConvergedAbsTol = 1e-4;  // kWh, used when central_obj <= 0

/// First step whose objective is within 1% of central_obj, or within
/// kConvergedAbsTol when central_obj <= 0. -1 when no step qualifies.
long iterations_to_tolerance(const ObjectiveTrace& trace, double central_obj);

struct AlgorithmSummary {
  std::string algorithm;
  long iterations_to_tolerance = -1;
  long steps = 0;
  double final_objective = 0.0;
  double relative_gap = 0.0;  // (final - central) / central, absolute when central <= 0
};

/// Energy accounting between baseline and optimized schedules. Grid-side
/// energy is Σ d; with s[t+1] = s[t] + β^c x - y and d containing x - β^d y,
/// the optimized-minus-baseline difference is Σ x (1 - β^c β^d) + β^d Δs when
/// the baseline leaves storage idle.
struct EnergyAccounting {
  double max_consumption_gap = 0.0;  // max_n |Σ(P + e)_opt - Σ(P + e)_base|
  double grid_difference = 0.0;      // Σ d_opt - Σ d_base
  double round_trip_loss = 0.0;      // Σ x (1 - β^c β^d), optimized side
  double storage_term = 0.0;         // Σ β^d (s_end - s_init), optimized side
};

struct ComparisonReport {
  double baseline_peak_ramp = 0.0;
  double optimized_peak_ramp = 0.0;
  double reduction_fraction = 0.0;
  Vector baseline_net_load;
  Vector optimized_net_load;
  double baseline_spread = 0.0;   // max - min of the net-load series
  double optimized_spread = 0.0;
  double central_objective = 0.0;
  std::vector<AlgorithmSummary> algorithms;
};

/// reduction_fraction = 1 - optimized / baseline (0 when both are 0).
/// Throws InvalidInput when the net-load series lengths differ.
ComparisonReport compare(const SystemSolution& baseline, const SystemSolution& optimized,
                         double central_obj, const std::vector<ObjectiveTrace>& traces);

/// Needs both solutions to carry schedules for the same prosumers.
EnergyAccounting energy_accounting(const Scenario& scenario, const SystemSolution& baseline,
                                   const SystemSolution& optimized);

}  // namespace peakramp
