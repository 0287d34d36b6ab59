#include "peakramp/metrics.hpp"

#include <cmath>
#include <limits>

namespace peakramp {

ObjectiveTrace objective_trace(const std::string& algorithm, const std::vector<SyncRecord>& trace) {
  ObjectiveTrace out{algorithm, {}, {}};
  for (const auto& rec : trace) {
    out.steps.push_back(rec.iter);
    out.objectives.push_back(rec.objective);
  }
  return out;
}

ObjectiveTrace objective_trace(const std::string& algorithm, const std::vector<AsyncRecord>& trace) {
  ObjectiveTrace out{algorithm, {}, {}};
  for (const auto& rec : trace) {
    out.steps.push_back(rec.event);
    out.objectives.push_back(rec.objective);
  }
  return out;
}

namespace {

bool within_tolerance(double value, double central) {
  if (central <= 0.0) return std::abs(value - central) < kConvergedAbsTol;
  return std::abs(value - central) / central < kConvergedRelTol;
}

double relative_gap(double value, double central) {
  return central <= 0.0 ? value - central : (value - central) / central;
}

double spread(const Vector& v) { return v.size() == 0 ? 0.0 : v.maxCoeff() - v.minCoeff(); }

}  // namespace

long iterations_to_tolerance(const ObjectiveTrace& trace, double central_obj) {
  if (trace.steps.size() != trace.objectives.size())
    throw InvalidInput("objective trace: steps and objectives differ in length");
  for (std::size_t i = 0; i < trace.steps.size(); ++i)
    if (within_tolerance(trace.objectives[i], central_obj)) return trace.steps[i];
  return -1;
}

ComparisonReport compare(const SystemSolution& baseline, const SystemSolution& optimized,
                         double central_obj, const std::vector<ObjectiveTrace>& traces) {
  if (baseline.net_load.size() != optimized.net_load.size())
    throw InvalidInput("compare: baseline and optimized horizons differ");
  ComparisonReport r;
  r.baseline_peak_ramp = baseline.peak_ramp;
  r.optimized_peak_ramp = optimized.peak_ramp;
  if (baseline.peak_ramp > 0.0) {
    r.reduction_fraction = 1.0 - optimized.peak_ramp / baseline.peak_ramp;
  } else if (optimized.peak_ramp > 0.0) {
    r.reduction_fraction = -std::numeric_limits<double>::infinity();
  }
  r.baseline_net_load = baseline.net_load;
  r.optimized_net_load = optimized.net_load;
  r.baseline_spread = spread(baseline.net_load);
  r.optimized_spread = spread(optimized.net_load);
  r.central_objective = central_obj;
  for (const auto& trace : traces) {
    AlgorithmSummary s;
    s.algorithm = trace.algorithm;
    s.iterations_to_tolerance = iterations_to_tolerance(trace, central_obj);
    s.steps = trace.steps.empty() ? 0 : trace.steps.back();
    if (!trace.objectives.empty()) {
      s.final_objective = trace.objectives.back();
      s.relative_gap = relative_gap(s.final_objective, central_obj);
    }
    r.algorithms.push_back(std::move(s));
  }
  return r;
}

EnergyAccounting energy_accounting(const Scenario& sc, const SystemSolution& baseline,
                                   const SystemSolution& optimized) {
  if (baseline.schedules.size() != sc.prosumers.size() ||
      optimized.schedules.size() != sc.prosumers.size())
    throw InvalidInput("energy_accounting: schedule count differs from the scenario");
  EnergyAccounting acc;
  for (std::size_t n = 0; n < sc.prosumers.size(); ++n) {
    const ProsumerParams& p = sc.prosumers[n];
    const Schedule& b = baseline.schedules[n];
    const Schedule& o = optimized.schedules[n];
    const double consumed_b = p.inelastic.sum() + b.elastic.sum();
    const double consumed_o = p.inelastic.sum() + o.elastic.sum();
    acc.max_consumption_gap = std::max(acc.max_consumption_gap, std::abs(consumed_o - consumed_b));
    acc.grid_difference += o.net_demand.sum() - b.net_demand.sum();
    acc.round_trip_loss += o.charge.sum() * (1.0 - p.eff_charge * p.eff_discharge);
    acc.storage_term += p.eff_discharge * (o.storage[o.storage.size() - 1] - o.storage[0]);
  }
  return acc;
}

}  // namespace peakramp
