#pragma once

// Seeded synthetic scenarios and the no-optimization baseline.
//
// Slot ranges in GenConfig are 1-based and inclusive, as in "slots 8..22".

#include "peakramp/model.hpp"

#include <cstdint>

namespace peakramp {

struct SlotRange {
  int first = 1;
  int last = 1;

  int count() const { return last - first + 1; }
  bool contains(int slot) const { return slot >= first && slot <= last; }
};

struct GenConfig {
  int n_prosumers = 100;
  int horizon = 24;
  double daily_demand_mean = 30.0;
  double daily_demand_spread = 0.10;  // totals ~ U[mean (1 - spread), mean (1 + spread)]
  double elastic_fraction = 0.30;
  double peak_ratio = 3.0;  // peak-hour inelastic level over off-peak level
  SlotRange peak_hours{8, 22};
  SlotRange renewable_hours{10, 20};
  double renewable_fraction_of_demand = 0.40;
  double storage_cap = 4.0;
  double storage_init_fraction = 0.25;
  double eff = 0.9;
  double charge_max = 1.0;
  double discharge_max = 1.0;
  std::uint64_t rng_seed = 7;
  HyperParams hyper;

  /// Throws InvalidInput on fractions outside [0, 1], ranges outside the
  /// horizon, or non-positive sizes.
  void validate() const;
};

/// Rounds to 9 significant digits, the precision of scenario files.
double round_significant(double value);

Scenario generate(const GenConfig& cfg);

/// Elastic energy split in proportion to the inelastic profile, clipped to
/// [e_min, e_max] with the excess redistributed; storage idle.
Schedule baseline_prosumer_schedule(const ProsumerParams& params);

SystemSolution baseline_schedule(const Scenario& scenario);

}  // namespace peakramp
